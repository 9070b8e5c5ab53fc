#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "mfl/particles.hpp"
#include "mfl/rng.hpp"

namespace mfl {

// Reference measure rho = exp(-U) with a strongly convex potential U.
class BaseMeasure {
 public:
  using GradientFn = std::function<void(Point, MutablePoint)>;
  using LogDensityFn = std::function<double(Point)>;
  using SamplerFn = std::function<void(CounterStream&, MutablePoint)>;

  struct Spec {
    std::string name = "custom";
    std::size_t dim = 1;
    GradientFn grad_potential;
    // log rho up to an additive constant.
    LogDensityFn log_density;
    double strong_convexity = 1.0;  // r
    double grad_lipschitz = 1.0;    // R
    SamplerFn sampler;
    // log of the normalizing constant of exp(log_density); computed by
    // quadrature over center +- 12 scale when absent (1-D only).
    std::optional<double> log_normalizer;
    // Location and spread hints used to place quadrature grids.
    double center = 0.0;
    double scale = 1.0;
  };

  // Validates r <= R, positivity, and grad U(0) = 0.
  explicit BaseMeasure(Spec spec);

  static BaseMeasure standard_gaussian(std::size_t dim = 1);

  const std::string& name() const { return spec_.name; }
  std::size_t dim() const { return spec_.dim; }
  double strong_convexity() const { return spec_.strong_convexity; }
  double grad_lipschitz() const { return spec_.grad_lipschitz; }
  double center() const { return spec_.center; }
  double scale() const { return spec_.scale; }

  void grad_potential(Point x, MutablePoint out) const { spec_.grad_potential(x, out); }
  // Normalized log density.
  double log_density(Point x) const { return spec_.log_density(x) - log_normalizer_; }
  double log_density(double x) const { return log_density(Point(&x, 1)); }
  void sample(CounterStream& stream, MutablePoint out) const { spec_.sampler(stream, out); }

 private:
  Spec spec_;
  double log_normalizer_ = 0.0;
};

// n i.i.d. draws; particle i uses the stream (seed, 0, i, tag), so the output
// is a pure function of (base, n, seed, tag).
// Throws std::invalid_argument for n < 1.
ParticleSet sample_base(const BaseMeasure& base, std::int64_t n, std::uint64_t seed,
                        StreamTag tag = StreamTag::kInitMu);

}  // namespace mfl
