#include "mfl/particles.hpp"

#include <cmath>

#include <fmt/core.h>

#include "mfl/errors.hpp"

namespace mfl {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

ParticleSet::ParticleSet(std::size_t n, std::size_t d) : n_(n), d_(d), data_(n * d, 0.0) {
  require(n >= 1, "particle set needs at least one particle");
  require(d >= 1, "particle dimension must be at least one");
}

ParticleSet::ParticleSet(std::size_t n, std::size_t d, std::vector<double> coordinates)
    : n_(n), d_(d), data_(std::move(coordinates)) {
  require(n >= 1, "particle set needs at least one particle");
  require(d >= 1, "particle dimension must be at least one");
  require(data_.size() == n * d,
          fmt::format("expected {} coordinates for {}x{} particles, got {}", n * d, n, d,
                      data_.size()));
  require(all_finite(), "particle coordinates must be finite");
}

ParticleSet ParticleSet::from_values(std::vector<double> values) {
  const std::size_t n = values.size();
  return ParticleSet(n, 1, std::move(values));
}

std::vector<double> ParticleSet::values() const {
  if (d_ != 1) throw UnsupportedDimension("values() requires a one-dimensional particle set");
  return data_;
}

bool ParticleSet::all_finite() const {
  for (const double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double ParticleSet::mean_squared_norm() const {
  double total = 0.0;
  for (const double v : data_) total += v * v;
  return n_ == 0 ? 0.0 : total / static_cast<double>(n_);
}

}  // namespace mfl
