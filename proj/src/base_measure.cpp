#include "mfl/base_measure.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/core.h>

#include "mfl/errors.hpp"

namespace mfl {
namespace {

// Trapezoid log-normalizer of exp(log_density) over center +- 12 scale.
double quadrature_log_normalizer(const BaseMeasure::LogDensityFn& log_density, double center,
                                 double scale) {
  constexpr int kNodes = 20001;
  const double a = center - 12.0 * scale;
  const double b = center + 12.0 * scale;
  const double dx = (b - a) / (kNodes - 1);
  std::vector<double> logs(kNodes);
  double peak = -INFINITY;
  for (int i = 0; i < kNodes; ++i) {
    const double x = a + dx * i;
    logs[i] = log_density(Point(&x, 1));
    peak = std::max(peak, logs[i]);
  }
  double total = 0.0;
  for (int i = 0; i < kNodes; ++i) {
    const double w = (i == 0 || i == kNodes - 1) ? 0.5 : 1.0;
    total += w * std::exp(logs[i] - peak);
  }
  return peak + std::log(total * dx);
}

}  // namespace

BaseMeasure::BaseMeasure(Spec spec) : spec_(std::move(spec)) {
  require(spec_.dim >= 1, "base measure dimension must be at least one");
  require(static_cast<bool>(spec_.grad_potential), "base measure needs grad_potential");
  require(static_cast<bool>(spec_.log_density), "base measure needs log_density");
  require(static_cast<bool>(spec_.sampler), "base measure needs a sampler");
  require(spec_.strong_convexity > 0.0 && spec_.grad_lipschitz > 0.0,
          "strong convexity and gradient Lipschitz constants must be positive");
  require(spec_.strong_convexity <= spec_.grad_lipschitz,
          fmt::format("strong convexity r={} exceeds gradient Lipschitz constant R={}",
                      spec_.strong_convexity, spec_.grad_lipschitz));
  require(spec_.scale > 0.0, "base measure scale hint must be positive");

  std::vector<double> origin(spec_.dim, 0.0);
  std::vector<double> grad(spec_.dim, 0.0);
  spec_.grad_potential(origin, grad);
  double norm = 0.0;
  for (const double g : grad) norm += g * g;
  require(std::sqrt(norm) <= 1e-8 * (1.0 + spec_.grad_lipschitz),
          fmt::format("base potential must satisfy grad U(0) = 0 (|grad U(0)| = {})",
                      std::sqrt(norm)));

  if (spec_.log_normalizer) {
    log_normalizer_ = *spec_.log_normalizer;
  } else {
    if (spec_.dim != 1) {
      throw UnsupportedDimension(
          "a log normalizer must be supplied for base measures with d > 1");
    }
    log_normalizer_ = quadrature_log_normalizer(spec_.log_density, spec_.center, spec_.scale);
  }
}

BaseMeasure BaseMeasure::standard_gaussian(std::size_t dim) {
  Spec spec;
  spec.name = "gaussian";
  spec.dim = dim;
  spec.grad_potential = [](Point x, MutablePoint out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i];
  };
  spec.log_density = [](Point x) {
    double sq = 0.0;
    for (const double v : x) sq += v * v;
    return -0.5 * sq;
  };
  spec.strong_convexity = 1.0;
  spec.grad_lipschitz = 1.0;
  spec.sampler = [](CounterStream& stream, MutablePoint out) {
    for (double& v : out) v = stream.normal();
  };
  spec.log_normalizer = 0.5 * static_cast<double>(dim) * std::log(2.0 * std::numbers::pi);
  return BaseMeasure(std::move(spec));
}

ParticleSet sample_base(const BaseMeasure& base, std::int64_t n, std::uint64_t seed,
                        StreamTag tag) {
  require(n >= 1, fmt::format("sample_base needs n >= 1, got {}", n));
  ParticleSet out(static_cast<std::size_t>(n), base.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    CounterStream stream(seed, 0, static_cast<std::uint32_t>(i), tag);
    base.sample(stream, out[i]);
  }
  return out;
}

}  // namespace mfl
