#include "mfl/weighting.hpp"

#include <cmath>

#include <fmt/core.h>

#include "mfl/errors.hpp"

namespace mfl {
namespace {

// Neumaier step: adds value to (sum, compensation).
inline void compensated_add(double& sum, double& compensation, double value) {
  const double t = sum + value;
  if (std::abs(sum) >= std::abs(value)) {
    compensation += (sum - t) + value;
  } else {
    compensation += (value - t) + sum;
  }
  sum = t;
}

}  // namespace

WeightingScheme::WeightingScheme(double exponent) : exponent_(exponent) {
  require(std::isfinite(exponent) && exponent >= 0.0,
          fmt::format("weight exponent must be >= 0, got {}", exponent));
}

double WeightingScheme::weight(std::int64_t k) const {
  require(k >= 1, fmt::format("weight index must be >= 1, got {}", k));
  return exponent_ == 0.0 ? 1.0 : std::pow(static_cast<double>(k), exponent_);
}

double WeightingScheme::cumulative(std::int64_t k) const {
  require(k >= 1, fmt::format("cumulative weight index must be >= 1, got {}", k));
  double sum = 0.0, compensation = 0.0;
  for (std::int64_t j = 1; j <= k; ++j) compensated_add(sum, compensation, weight(j));
  return sum + compensation;
}

double cum_weight(const WeightingScheme& scheme, std::int64_t k) { return scheme.cumulative(k); }

CumulativeWeight::CumulativeWeight(const WeightingScheme& scheme) : scheme_(scheme) {}

void CumulativeWeight::advance() {
  ++k_;
  beta_ = scheme_.weight(k_);
  compensated_add(sum_, compensation_, beta_);
  total_ = sum_ + compensation_;
}

std::int64_t weighted_count(double beta, double total, std::int64_t n) {
  // Ratios that are integers in exact arithmetic may land one ulp low.
  const double ratio = beta * static_cast<double>(n) / total;
  return static_cast<std::int64_t>(std::floor(ratio * (1.0 + 1e-12)));
}

}  // namespace mfl
