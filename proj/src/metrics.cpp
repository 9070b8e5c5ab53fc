#include "mfl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "mfl/errors.hpp"
#include "mfl/log.hpp"
#include "mfl/objective.hpp"

namespace mfl {
namespace {

std::vector<double> sorted_1d(const ParticleSet& x, const char* what) {
  if (x.dim() != 1) throw UnsupportedDimension(fmt::format("{} requires d = 1", what));
  std::vector<double> v(x.coordinates().begin(), x.coordinates().end());
  std::sort(v.begin(), v.end());
  return v;
}

// log of the trapezoid rule applied to exp(logs) with spacing dx.
double trapezoid_log_integral(std::span<const double> logs, double dx) {
  double peak = -INFINITY;
  for (const double l : logs) peak = std::max(peak, l);
  if (!std::isfinite(peak)) throw NumericalFailure("quadrature log-weights are not finite");
  double total = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double w = (i == 0 || i + 1 == logs.size()) ? 0.5 : 1.0;
    total += w * std::exp(logs[i] - peak);
  }
  return peak + std::log(total * dx);
}

}  // namespace

double w1_empirical_1d(const ParticleSet& x, const ParticleSet& y) {
  require(x.size() == y.size(),
          fmt::format("w1_empirical_1d needs equal sizes, got {} and {}", x.size(), y.size()));
  const auto a = sorted_1d(x, "w1_empirical_1d");
  const auto b = sorted_1d(y, "w1_empirical_1d");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total / static_cast<double>(a.size());
}

// --- GibbsQuadrature -------------------------------------------------------

GibbsQuadrature::GibbsQuadrature(double lower, double upper, std::vector<double> log_weights)
    : lower_(lower), upper_(upper), log_weights_(std::move(log_weights)) {
  require(log_weights_.size() >= 2, "quadrature grid needs at least two nodes");
  require(upper_ > lower_, "quadrature grid needs lower < upper");
  spacing_ = (upper_ - lower_) / static_cast<double>(log_weights_.size() - 1);
  log_partition_ = trapezoid_log_integral(log_weights_, spacing_);

  // Running trapezoid CDF of the normalized density.
  const std::size_t m = log_weights_.size();
  cdf_.assign(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) {
    const double left = std::exp(log_weights_[i - 1] - log_partition_);
    const double right = std::exp(log_weights_[i] - log_partition_);
    cdf_[i] = cdf_[i - 1] + 0.5 * spacing_ * (left + right);
  }
  const double last = cdf_.back();
  for (double& c : cdf_) c /= last;
}

GibbsQuadrature GibbsQuadrature::from_log_density(
    double lower, double upper, std::size_t nodes,
    const std::function<double(double)>& log_density) {
  require(nodes >= 2, "quadrature grid needs at least two nodes");
  std::vector<double> logs(nodes);
  const double dx = (upper - lower) / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) logs[i] = log_density(lower + dx * static_cast<double>(i));
  return GibbsQuadrature(lower, upper, std::move(logs));
}

GibbsQuadrature GibbsQuadrature::gibbs(const BaseMeasure& base,
                                       const std::function<double(double)>& potential,
                                       double temperature, std::size_t nodes, double half_width) {
  if (base.dim() != 1) throw UnsupportedDimension("Gibbs quadrature requires d = 1");
  require(temperature > 0.0, "Gibbs quadrature needs a positive temperature");
  const double a = base.center() - half_width * base.scale();
  const double b = base.center() + half_width * base.scale();
  return from_log_density(a, b, nodes, [&](double x) {
    return base.log_density(x) - potential(x) / temperature;
  });
}

std::vector<double> GibbsQuadrature::weights() const {
  std::vector<double> w(size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double end = (i == 0 || i + 1 == w.size()) ? 0.5 : 1.0;
    w[i] = end * spacing_ * std::exp(log_weights_[i] - log_partition_);
  }
  return w;
}

std::vector<double> GibbsQuadrature::log_density() const {
  std::vector<double> out(log_weights_);
  for (double& v : out) v -= log_partition_;
  return out;
}

double GibbsQuadrature::cdf(double x) const {
  if (x <= lower_) return 0.0;
  if (x >= upper_) return 1.0;
  const double pos = (x - lower_) / spacing_;
  const auto i = std::min(static_cast<std::size_t>(pos), size() - 2);
  const double t = pos - static_cast<double>(i);
  return cdf_[i] + t * (cdf_[i + 1] - cdf_[i]);
}

double GibbsQuadrature::quantile(double p) const {
  p = std::clamp(p, 0.0, 1.0);
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
  if (it == cdf_.begin()) return lower_;
  if (it == cdf_.end()) return upper_;
  const auto i = static_cast<std::size_t>(it - cdf_.begin());
  const double c0 = cdf_[i - 1], c1 = cdf_[i];
  const double t = c1 > c0 ? (p - c0) / (c1 - c0) : 0.0;
  return node(i - 1) + t * spacing_;
}

double GibbsQuadrature::expectation(const std::function<double(double)>& f) const {
  const auto w = weights();
  std::vector<double> terms(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) terms[i] = w[i] * f(node(i));
  return pairwise_sum(terms);
}

double kl_divergence(const GibbsQuadrature& p, const GibbsQuadrature& q) {
  require(p.size() == q.size() && p.lower() == q.lower() && p.upper() == q.upper(),
          "kl_divergence needs both densities on the same grid");
  const auto w = p.weights();
  const auto lp = p.log_density();
  const auto lq = q.log_density();
  std::vector<double> terms(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) terms[i] = w[i] * (lp[i] - lq[i]);
  return pairwise_sum(terms);
}

double w1_to_quadrature(const ParticleSet& x, const GibbsQuadrature& g) {
  const auto v = sorted_1d(x, "w1_to_quadrature");
  if (v.front() < g.lower() || v.back() > g.upper()) {
    warn(fmt::format("samples [{}, {}] extend beyond the quadrature grid [{}, {}]; "
                     "quantiles are clamped to the grid",
                     v.front(), v.back(), g.lower(), g.upper()));
  }
  const auto n = static_cast<double>(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    total += std::abs(v[i] - g.quantile((static_cast<double>(i) + 0.5) / n));
  }
  return total / n;
}

// --- NI --------------------------------------------------------------------

namespace {

struct ResponseTerm {
  double value;  // lambda log Z, or the sup / -inf at lambda = 0
  std::size_t nodes;
};

// lambda log int rho exp(sign field / lambda) over the base grid, refined by
// grid doubling until two successive values agree to the tolerance.
ResponseTerm best_response_term(const BaseMeasure& base, const std::function<double(double)>& field,
                                double sign, double temperature, const GridConfig& grid) {
  if (base.dim() != 1) throw UnsupportedDimension("NI quadrature requires d = 1");
  const double a = base.center() - grid.half_width * base.scale();
  const double b = base.center() + grid.half_width * base.scale();
  std::size_t coarse = std::max<std::size_t>(grid.nodes, 3);
  while (true) {
    const std::size_t fine = 2 * coarse - 1;
    if (fine > grid.max_nodes) {
      throw NumericalFailure(fmt::format(
          "NI quadrature did not settle to {} below {} nodes", grid.tolerance, grid.max_nodes));
    }
    const double dx = (b - a) / static_cast<double>(fine - 1);
    std::vector<double> values(fine);
    for (std::size_t i = 0; i < fine; ++i) values[i] = field(a + dx * static_cast<double>(i));

    double fine_term, coarse_term;
    if (temperature == 0.0) {
      double fine_best = -INFINITY, coarse_best = -INFINITY;
      for (std::size_t i = 0; i < fine; ++i) {
        const double v = sign * values[i];
        fine_best = std::max(fine_best, v);
        if (i % 2 == 0) coarse_best = std::max(coarse_best, v);
      }
      fine_term = fine_best;
      coarse_term = coarse_best;
    } else {
      std::vector<double> logs(fine), coarse_logs(coarse);
      for (std::size_t i = 0; i < fine; ++i) {
        logs[i] = base.log_density(a + dx * static_cast<double>(i)) + sign * values[i] / temperature;
        if (i % 2 == 0) coarse_logs[i / 2] = logs[i];
      }
      fine_term = temperature * trapezoid_log_integral(logs, dx);
      coarse_term = temperature * trapezoid_log_integral(coarse_logs, 2.0 * dx);
    }
    if (!std::isfinite(fine_term)) throw NumericalFailure("NI best-response term is not finite");
    if (std::abs(fine_term - coarse_term) <= grid.tolerance) return {fine_term, fine};
    coarse = fine;
  }
}

}  // namespace

NiEstimate ni_quadrature(const Payoff& q, const ParticleSet& x, const ParticleSet& y,
                         double temperature, const BaseMeasure& base_mu,
                         const BaseMeasure& base_nu, const GridConfig& grid) {
  require(temperature >= 0.0, "temperature must be >= 0");
  if (x.dim() != 1 || y.dim() != 1) throw UnsupportedDimension("ni_quadrature requires d = 1");
  const auto xs = x.coordinates();
  const auto ys = y.coordinates();

  // f(t) = mean_i Q(X^i, t): the max player's payoff against mu_X.
  const auto f = [&](double t) {
    double s = 0.0;
    for (const double xi : xs) s += q.value(Point(&xi, 1), Point(&t, 1));
    return s / static_cast<double>(xs.size());
  };
  // g(t) = mean_j Q(t, Y^j): the min player's cost against nu_Y.
  const auto g = [&](double t) {
    double s = 0.0;
    for (const double yj : ys) s += q.value(Point(&t, 1), Point(&yj, 1));
    return s / static_cast<double>(ys.size());
  };

  const ResponseTerm nu_term = best_response_term(base_nu, f, +1.0, temperature, grid);
  const ResponseTerm mu_term = best_response_term(base_mu, g, -1.0, temperature, grid);

  NiEstimate out;
  out.grid_nodes = std::max(nu_term.nodes, mu_term.nodes);
  if (temperature == 0.0) {
    // sup f - inf g
    out.log_partition_nu = nu_term.value;
    out.log_partition_mu = mu_term.value;
    out.value = nu_term.value + mu_term.value;
    return out;
  }
  out.log_partition_nu = nu_term.value / temperature;
  out.log_partition_mu = mu_term.value / temperature;
  out.kl_mu = kl_empirical_kde(x, base_mu);
  out.kl_nu = kl_empirical_kde(y, base_nu);
  out.bias_budget = temperature * (kde_bias_budget(x) + kde_bias_budget(y));
  out.value = nu_term.value + mu_term.value + temperature * (out.kl_mu + out.kl_nu);
  return out;
}

double ni_quadrature_density(const Payoff& q, const GibbsQuadrature& mu, const GibbsQuadrature& nu,
                             double temperature, const BaseMeasure& base_mu,
                             const BaseMeasure& base_nu, const GridConfig& grid) {
  require(temperature > 0.0, "ni_quadrature_density needs a positive temperature");
  const auto wm = mu.weights();
  const auto wn = nu.weights();
  const auto f = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < wm.size(); ++i) {
      const double xi = mu.node(i);
      s += wm[i] * q.value(Point(&xi, 1), Point(&t, 1));
    }
    return s;
  };
  const auto g = [&](double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < wn.size(); ++j) {
      const double yj = nu.node(j);
      s += wn[j] * q.value(Point(&t, 1), Point(&yj, 1));
    }
    return s;
  };
  const auto kl_to_base = [](const GibbsQuadrature& p, const BaseMeasure& base) {
    const auto w = p.weights();
    const auto lp = p.log_density();
    std::vector<double> terms(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      terms[i] = w[i] * (lp[i] - base.log_density(p.node(i)));
    }
    return pairwise_sum(terms);
  };
  const double nu_term = best_response_term(base_nu, f, +1.0, temperature, grid).value;
  const double mu_term = best_response_term(base_mu, g, -1.0, temperature, grid).value;
  return nu_term + mu_term +
         temperature * (kl_to_base(mu, base_mu) + kl_to_base(nu, base_nu));
}

std::array<double, 3> ni_three_point(const Payoff& q, std::span<const CandidatePair> candidates,
                                     double temperature, const BaseMeasure& base_mu,
                                     const BaseMeasure& base_nu, int threads) {
  require(candidates.size() == 3, "ni_three_point needs exactly three candidates");
  std::array<double, 3> kl_x{}, kl_y{};
  for (std::size_t i = 0; i < 3; ++i) {
    require(candidates[i].x && candidates[i].y, "ni_three_point candidate is null");
    if (candidates[i].x->dim() != 1 || candidates[i].y->dim() != 1) {
      throw UnsupportedDimension("ni_three_point requires d = 1");
    }
    if (temperature > 0.0) {
      kl_x[i] = kl_empirical_kde(*candidates[i].x, base_mu);
      kl_y[i] = kl_empirical_kde(*candidates[i].y, base_nu);
    }
  }
  // value[i][j] = L_lambda(mu_{X^i}, nu_{Y^j})
  std::array<std::array<double, 3>, 3> value{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      value[i][j] = bilinear_value(q, *candidates[i].x, *candidates[j].y, threads) +
                    temperature * kl_x[i] - temperature * kl_y[j];
    }
  }
  std::array<double, 3> ni{};
  for (std::size_t i = 0; i < 3; ++i) {
    double best_max = -INFINITY, best_min = INFINITY;
    for (std::size_t j = 0; j < 3; ++j) {
      best_max = std::max(best_max, value[i][j]);
      best_min = std::min(best_min, value[j][i]);
    }
    ni[i] = best_max - best_min;
  }
  return ni;
}

double lsi_log_lower_bound(double r, double R, double M, double temperature, double d) {
  require(r > 0.0 && R > 0.0 && temperature > 0.0 && d > 0.0 && M >= 0.0,
          "lsi_lower_bound needs positive r, R, lambda, d and M >= 0");
  const double ratio = M * M / (r * temperature * temperature);  // M^2 / (r lambda^2)
  const double log_exponential =
      std::log(0.5 * r) - 4.0 * ratio * std::sqrt(2.0 * d / std::numbers::pi);
  const double shift = M / (r * temperature) + std::sqrt(2.0 / r);
  const double bracket = 2.0 + 0.5 * d * std::log(std::exp(2.0) * R / r) + 4.0 * ratio;
  // -log(4/r + shift^2 bracket exp(ratio / 2))
  const double a = std::log(4.0 / r), b = std::log(shift * shift * bracket) + 0.5 * ratio;
  const double hi = std::max(a, b);
  const double log_polynomial = -(hi + std::log1p(std::exp(std::min(a, b) - hi)));
  return std::max(log_exponential, log_polynomial);
}

double lsi_lower_bound(double r, double R, double M, double temperature, double d) {
  return std::exp(lsi_log_lower_bound(r, R, M, temperature, d));
}

}  // namespace mfl
