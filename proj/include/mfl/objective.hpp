#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mfl/base_measure.hpp"
#include "mfl/particles.hpp"
#include "mfl/payoff.hpp"

namespace mfl {

// Gradients of the first variations of L(mu, nu), evaluated on empirical
// measures. The dynamics only see this interface.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim_x() const = 0;
  virtual std::size_t dim_y() const = 0;
  // out[i] = grad_x dL/dmu(mu_X, nu_Y)(at[i])
  virtual void grad_mu(const ParticleSet& at, const ParticleSet& x, const ParticleSet& y,
                       FieldBuffer& out, int threads) const = 0;
  // out[i] = grad_y dL/dnu(mu_X, nu_Y)(at[i])
  virtual void grad_nu(const ParticleSet& at, const ParticleSet& x, const ParticleSet& y,
                       FieldBuffer& out, int threads) const = 0;
  // Non-null when L(mu, nu) = int int Q dmu dnu.
  virtual const Payoff* bilinear_kernel() const { return nullptr; }
};

class BilinearObjective final : public Objective {
 public:
  explicit BilinearObjective(PayoffPtr payoff);

  std::size_t dim_x() const override { return payoff_->dim_x(); }
  std::size_t dim_y() const override { return payoff_->dim_y(); }
  void grad_mu(const ParticleSet& at, const ParticleSet& x, const ParticleSet& y,
               FieldBuffer& out, int threads) const override;
  void grad_nu(const ParticleSet& at, const ParticleSet& x, const ParticleSet& y,
               FieldBuffer& out, int threads) const override;
  const Payoff* bilinear_kernel() const override { return payoff_.get(); }
  const PayoffPtr& payoff() const { return payoff_; }

 private:
  PayoffPtr payoff_;
};

// General (non-bilinear) objective given by per-point drift callbacks.
class CallbackObjective final : public Objective {
 public:
  using DriftFn =
      std::function<void(Point at, const ParticleSet& x, const ParticleSet& y, MutablePoint out)>;

  CallbackObjective(std::size_t dim_x, std::size_t dim_y, DriftFn grad_mu, DriftFn grad_nu);

  std::size_t dim_x() const override { return dim_x_; }
  std::size_t dim_y() const override { return dim_y_; }
  void grad_mu(const ParticleSet& at, const ParticleSet& x, const ParticleSet& y,
               FieldBuffer& out, int threads) const override;
  void grad_nu(const ParticleSet& at, const ParticleSet& x, const ParticleSet& y,
               FieldBuffer& out, int threads) const override;

 private:
  std::size_t dim_x_, dim_y_;
  DriftFn grad_mu_, grad_nu_;
};

// (1/(n_X n_Y)) sum_i sum_j Q(X^i, Y^j). Row sums run in index order and are
// combined by pairwise summation, independent of the thread count.
double bilinear_value(const Payoff& q, const ParticleSet& x, const ParticleSet& y,
                      int threads = 1);

// (1/n_Y) sum_m grad_x Q(x, Y^m); the lambda grad U term is the caller's.
std::vector<double> drift_mu(const Payoff& q, Point x, const ParticleSet& y);
// (1/n_X) sum_m grad_y Q(X^m, y).
std::vector<double> drift_nu(const Payoff& q, const ParticleSet& x, Point y);

// Gaussian kernel density estimate of a one-dimensional particle set.
//
// Bandwidth defaults to Silverman's rule h = 1.06 sigma n^(-1/5). Kernel
// terms farther than 10 h from the evaluation point are skipped: each is
// below exp(-50) of the self term, which is under double-precision
// resolution of the sum.
class KdeEstimator {
 public:
  explicit KdeEstimator(const ParticleSet& source, std::optional<double> bandwidth = {});

  double bandwidth() const { return bandwidth_; }
  std::size_t size() const { return sorted_.size(); }
  double density(double x) const;
  double log_density(double x) const { return std::log(density(x)); }
  std::span<const double> sorted_source() const { return sorted_; }

  static double silverman_bandwidth(std::span<const double> values);

 private:
  std::vector<double> sorted_;
  double bandwidth_;
};

// (1/n) sum_i log(p_h(X^i) / rho(X^i)) with the KDE p_h of X itself. The
// estimate is biased (it may be negative); d = 1 and n >= 2 only.
double kl_empirical_kde(const ParticleSet& x, const BaseMeasure& base);

// A heuristic size for the KDE-KL bias at (n, h) and sample range:
// the self-term inflation range / (n h sqrt(2 pi)) plus the smoothing term h^2 / 2.
double kde_bias_budget(const ParticleSet& x);

// L(mu_X, nu_Y) + lambda KL(mu_X || rho_mu) - lambda KL(nu_Y || rho_nu). At
// lambda = 0 the KL terms are skipped and the result is bilinear_value.
double regularized_value(const Payoff& q, const ParticleSet& x, const ParticleSet& y,
                         double temperature, const BaseMeasure& base_mu,
                         const BaseMeasure& base_nu, int threads = 1);

// Sum of values combined pairwise in a fixed tree order.
double pairwise_sum(std::span<const double> values);

}  // namespace mfl
