#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfl {

using Point = std::span<const double>;
using MutablePoint = std::span<double>;

// N positions in R^d stored row-major. The empirical measure is uniform over
// the rows; row order has no meaning.
class ParticleSet {
 public:
  ParticleSet() = default;
  // Zero-filled set; n >= 1 and d >= 1.
  ParticleSet(std::size_t n, std::size_t d);
  // Takes ownership of row-major coordinates; size must be n * d and all
  // values finite.
  ParticleSet(std::size_t n, std::size_t d, std::vector<double> coordinates);

  // One-dimensional convenience constructor.
  static ParticleSet from_values(std::vector<double> values);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  bool empty() const { return n_ == 0; }

  Point operator[](std::size_t i) const { return {data_.data() + i * d_, d_}; }
  MutablePoint operator[](std::size_t i) { return {data_.data() + i * d_, d_}; }

  std::span<const double> coordinates() const { return data_; }
  std::span<double> coordinates() { return data_; }

  // Values of a one-dimensional set (d must be 1).
  std::vector<double> values() const;

  bool all_finite() const;
  double mean_squared_norm() const;

  friend bool operator==(const ParticleSet&, const ParticleSet&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

// Row-major n x d buffer for per-particle vectors (drifts, gradients).
using FieldBuffer = ParticleSet;

}  // namespace mfl
