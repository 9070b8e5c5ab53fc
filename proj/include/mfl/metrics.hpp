#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "mfl/base_measure.hpp"
#include "mfl/particles.hpp"
#include "mfl/payoff.hpp"

namespace mfl {

// Empirical W1 between equal-size one-dimensional samples via the sorted
// (monotone) coupling, which is optimal on the line.
double w1_empirical_1d(const ParticleSet& x, const ParticleSet& y);

// Unnormalized log-density tabulated on a uniform grid [a, b] with m nodes.
// Integrals use the trapezoid rule; the CDF is the running trapezoid sum and
// quantiles interpolate it linearly between nodes.
class GibbsQuadrature {
 public:
  GibbsQuadrature(double lower, double upper, std::vector<double> log_weights);

  static GibbsQuadrature from_log_density(double lower, double upper, std::size_t nodes,
                                          const std::function<double(double)>& log_density);
  // Density proportional to rho(x) exp(-potential(x) / temperature) on the
  // grid center +- half_width * scale of the base.
  static GibbsQuadrature gibbs(const BaseMeasure& base,
                               const std::function<double(double)>& potential,
                               double temperature, std::size_t nodes = 4096,
                               double half_width = 8.0);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  std::size_t size() const { return log_weights_.size(); }
  double spacing() const { return spacing_; }
  double node(std::size_t i) const { return lower_ + spacing_ * static_cast<double>(i); }
  std::span<const double> log_weights() const { return log_weights_; }

  // log of the trapezoid integral of exp(log_weights).
  double log_partition() const { return log_partition_; }
  // Normalized trapezoid weights (sum to one).
  std::vector<double> weights() const;
  // Normalized log density at each node.
  std::vector<double> log_density() const;
  double cdf(double x) const;
  double quantile(double p) const;
  double expectation(const std::function<double(double)>& f) const;

 private:
  double lower_, upper_, spacing_;
  std::vector<double> log_weights_;
  double log_partition_;
  std::vector<double> cdf_;  // normalized, at nodes
};

// KL(p || q) for two tabulations on the same grid.
double kl_divergence(const GibbsQuadrature& p, const GibbsQuadrature& q);

// W1 between the empirical measure of X and the grid measure, using the
// quantile coupling: mean_i |x_(i) - F^{-1}((i + 1/2) / n)|.
// Samples outside the grid emit a warning; quantiles stay within the grid.
double w1_to_quadrature(const ParticleSet& x, const GibbsQuadrature& g);

struct GridConfig {
  std::size_t nodes = 4096;
  double half_width = 8.0;  // in base-measure scales
  // Refinement stops when doubling the grid moves each log-partition term
  // by at most this much.
  double tolerance = 1e-6;
  std::size_t max_nodes = std::size_t{1} << 20;
};

struct NiEstimate {
  double value = 0.0;
  double log_partition_mu = 0.0;  // log int rho_mu exp(-g / lambda)
  double log_partition_nu = 0.0;  // log int rho_nu exp(f / lambda)
  double kl_mu = 0.0;             // KDE estimate of KL(mu_X || rho_mu)
  double kl_nu = 0.0;
  double bias_budget = 0.0;  // lambda * (kde_bias_budget(X) + kde_bias_budget(Y))
  std::size_t grid_nodes = 0;
};

// NI(mu_X, nu_Y) through the Gibbs variational identity: the best responses
// to the empirical opponents are Gibbs measures, so
//   NI = lambda log Z_nu + lambda log Z_mu + lambda KL(mu_X) + lambda KL(nu_Y),
// with the log-partitions computed on 1-D grids and the KL terms by KDE.
// At lambda = 0 the best responses are point masses and
// NI = max_grid f - min_grid g.
NiEstimate ni_quadrature(const Payoff& q, const ParticleSet& x, const ParticleSet& y,
                         double temperature, const BaseMeasure& base_mu,
                         const BaseMeasure& base_nu, const GridConfig& grid = {});

// NI for smooth densities tabulated on grids (no KDE involved).
double ni_quadrature_density(const Payoff& q, const GibbsQuadrature& mu,
                             const GibbsQuadrature& nu, double temperature,
                             const BaseMeasure& base_mu, const BaseMeasure& base_nu,
                             const GridConfig& grid = {});

struct CandidatePair {
  const ParticleSet* x;
  const ParticleSet* y;
};

// NI^i = max_j L_lambda(X^i, Y^j) - min_j L_lambda(X^j, Y^i) over three
// candidates, all sharing the same KDE-KL estimator.
std::array<double, 3> ni_three_point(const Payoff& q, std::span<const CandidatePair> candidates,
                                     double temperature, const BaseMeasure& base_mu,
                                     const BaseMeasure& base_nu, int threads = 1);

// Log-Sobolev constant lower bound for rho exp(-h / lambda) with |h|_Lip <= M:
// the larger of
//   (r/2) exp(-(4 M^2 / (r lambda^2)) sqrt(2 d / pi))
// and
//   [4/r + (M/(r lambda) + sqrt(2/r))^2 (2 + (d/2) log(e^2 R / r) + 4 M^2/(r lambda^2))
//    exp(M^2 / (2 r lambda^2))]^(-1).
// Underflows to zero for large M^2 / (r lambda^2); the log form stays finite.
double lsi_lower_bound(double r, double R, double M, double temperature, double d);
double lsi_log_lower_bound(double r, double R, double M, double temperature, double d);

}  // namespace mfl
