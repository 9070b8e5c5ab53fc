#include "mfl/objective.hpp"

#include <algorithm>
#include <numbers>

#include <fmt/core.h>

#include "mfl/errors.hpp"
#include "mfl/parallel.hpp"

namespace mfl {

BilinearObjective::BilinearObjective(PayoffPtr payoff) : payoff_(std::move(payoff)) {
  require(payoff_ != nullptr, "bilinear objective needs a payoff");
}

void BilinearObjective::grad_mu(const ParticleSet& at, const ParticleSet&, const ParticleSet& y,
                                FieldBuffer& out, int threads) const {
  payoff_->mean_grad_x(at, y, out, threads);
}

void BilinearObjective::grad_nu(const ParticleSet& at, const ParticleSet& x, const ParticleSet&,
                                FieldBuffer& out, int threads) const {
  payoff_->mean_grad_y(x, at, out, threads);
}

CallbackObjective::CallbackObjective(std::size_t dim_x, std::size_t dim_y, DriftFn grad_mu,
                                     DriftFn grad_nu)
    : dim_x_(dim_x), dim_y_(dim_y), grad_mu_(std::move(grad_mu)), grad_nu_(std::move(grad_nu)) {
  require(grad_mu_ && grad_nu_, "callback objective needs both drifts");
}

void CallbackObjective::grad_mu(const ParticleSet& at, const ParticleSet& x, const ParticleSet& y,
                                FieldBuffer& out, int threads) const {
  parallel_for(at.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) grad_mu_(at[i], x, y, out[i]);
  });
}

void CallbackObjective::grad_nu(const ParticleSet& at, const ParticleSet& x, const ParticleSet& y,
                                FieldBuffer& out, int threads) const {
  parallel_for(at.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) grad_nu_(at[i], x, y, out[i]);
  });
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (const double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double bilinear_value(const Payoff& q, const ParticleSet& x, const ParticleSet& y, int threads) {
  require(!x.empty() && !y.empty(), "bilinear_value needs non-empty particle sets");
  require(x.dim() == q.dim_x() && y.dim() == q.dim_y(),
          "particle dimensions do not match the payoff");
  std::vector<double> rows(x.size());
  parallel_for(x.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) s += q.value(x[i], y[j]);
      rows[i] = s;
    }
  });
  return pairwise_sum(rows) / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

std::vector<double> drift_mu(const Payoff& q, Point x, const ParticleSet& y) {
  require(x.size() == q.dim_x(), "drift_mu point does not match the payoff dimension");
  ParticleSet at(1, x.size(), std::vector<double>(x.begin(), x.end()));
  FieldBuffer out(1, x.size());
  q.mean_grad_x(at, y, out, 1);
  const auto row = out[0];
  return {row.begin(), row.end()};
}

std::vector<double> drift_nu(const Payoff& q, const ParticleSet& x, Point y) {
  require(y.size() == q.dim_y(), "drift_nu point does not match the payoff dimension");
  ParticleSet at(1, y.size(), std::vector<double>(y.begin(), y.end()));
  FieldBuffer out(1, y.size());
  q.mean_grad_y(x, at, out, 1);
  const auto row = out[0];
  return {row.begin(), row.end()};
}

// --- KDE -------------------------------------------------------------------

namespace {

constexpr double kKernelCutoff = 10.0;  // in bandwidths

std::vector<double> sorted_values(const ParticleSet& x) {
  if (x.dim() != 1) {
    throw UnsupportedDimension(
        fmt::format("KDE estimators are one-dimensional; got d = {}", x.dim()));
  }
  std::vector<double> v(x.coordinates().begin(), x.coordinates().end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

double KdeEstimator::silverman_bandwidth(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  require(values.size() >= 2, "bandwidth selection needs at least two particles");
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / (n - 1.0));
  if (!(sigma > 0.0)) {
    throw NumericalFailure("KDE bandwidth is zero: all particles coincide");
  }
  if (!std::isfinite(sigma)) throw NumericalFailure("KDE bandwidth is not finite");
  return 1.06 * sigma * std::pow(n, -0.2);
}

KdeEstimator::KdeEstimator(const ParticleSet& source, std::optional<double> bandwidth)
    : sorted_(sorted_values(source)) {
  require(sorted_.size() >= 2, "KDE needs at least two particles");
  bandwidth_ = bandwidth ? *bandwidth : silverman_bandwidth(sorted_);
  require(bandwidth_ > 0.0 && std::isfinite(bandwidth_), "KDE bandwidth must be positive");
}

double KdeEstimator::density(double x) const {
  const double h = bandwidth_;
  const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), x - kKernelCutoff * h);
  const auto hi = std::upper_bound(lo, sorted_.end(), x + kKernelCutoff * h);
  const double inv_two_h2 = 1.0 / (2.0 * h * h);
  double s = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double d = x - *it;
    s += std::exp(-d * d * inv_two_h2);
  }
  return s / (static_cast<double>(sorted_.size()) * h * std::sqrt(2.0 * std::numbers::pi));
}

double kl_empirical_kde(const ParticleSet& x, const BaseMeasure& base) {
  if (x.dim() != 1 || base.dim() != 1) {
    throw UnsupportedDimension("kl_empirical_kde supports d = 1 only");
  }
  require(x.size() >= 2, "kl_empirical_kde needs at least two particles");
  const KdeEstimator kde(x);
  const auto points = kde.sorted_source();
  std::vector<double> terms(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    terms[i] = kde.log_density(points[i]) - base.log_density(points[i]);
  }
  return pairwise_sum(terms) / static_cast<double>(points.size());
}

double kde_bias_budget(const ParticleSet& x) {
  const auto v = sorted_values(x);
  require(v.size() >= 2, "kde_bias_budget needs at least two particles");
  const double h = KdeEstimator::silverman_bandwidth(v);
  const double range = v.back() - v.front();
  return range / (static_cast<double>(v.size()) * h * std::sqrt(2.0 * std::numbers::pi)) +
         0.5 * h * h;
}

double regularized_value(const Payoff& q, const ParticleSet& x, const ParticleSet& y,
                         double temperature, const BaseMeasure& base_mu,
                         const BaseMeasure& base_nu, int threads) {
  require(temperature >= 0.0, "temperature must be >= 0");
  const double value = bilinear_value(q, x, y, threads);
  if (temperature == 0.0) return value;
  return value + temperature * kl_empirical_kde(x, base_mu) -
         temperature * kl_empirical_kde(y, base_nu);
}

}  // namespace mfl
