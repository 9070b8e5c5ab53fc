#pragma once

#include <cstdint>

namespace mfl {

// beta_k = k^r for k >= 1, with cumulative sums B_k. The discrete algorithms
// only admit r >= 0.
class WeightingScheme {
 public:
  explicit WeightingScheme(double exponent = 1.0);

  double exponent() const { return exponent_; }
  double weight(std::int64_t k) const;
  // B_k, summed directly with compensation. Drivers use CumulativeWeight.
  double cumulative(std::int64_t k) const;

 private:
  double exponent_;
};

double cum_weight(const WeightingScheme& scheme, std::int64_t k);

// Running (k, beta_k, B_k) triple advanced one epoch at a time.
class CumulativeWeight {
 public:
  explicit CumulativeWeight(const WeightingScheme& scheme);

  std::int64_t index() const { return k_; }
  double weight() const { return beta_; }
  double total() const { return total_; }
  // Moves to k + 1.
  void advance();

 private:
  WeightingScheme scheme_;
  std::int64_t k_ = 1;
  double beta_ = 1.0;
  double total_ = 1.0;
  double sum_ = 1.0;
  double compensation_ = 0.0;
};

// floor(beta_k * n / B_k).
std::int64_t weighted_count(double beta, double total, std::int64_t n);

}  // namespace mfl
