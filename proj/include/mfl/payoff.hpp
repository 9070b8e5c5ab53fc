#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "mfl/particles.hpp"

namespace mfl {

// Regularity constants of the bilinear kernel. Absent values mean the
// payoff does not have a finite constant of that kind.
struct PayoffRegularity {
  std::optional<double> grad_bound_mu;  // M_mu = sup |grad_x Q|
  std::optional<double> grad_bound_nu;  // M_nu = sup |grad_y Q|
  std::optional<double> lip_mu;         // L_mu, Lipschitz constant of grad_x Q in x
  std::optional<double> lip_nu;
  std::optional<double> cross_lip_mu;  // K_mu, Lipschitz constant of grad_x Q in y
  std::optional<double> cross_lip_nu;
  std::optional<double> sup_bound;  // C = sup |Q|
};

// The kernel Q(x, y) of a bilinear objective L(mu, nu) = int int Q dmu dnu.
class Payoff {
 public:
  virtual ~Payoff() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim_x() const = 0;
  virtual std::size_t dim_y() const = 0;
  virtual double value(Point x, Point y) const = 0;
  virtual void grad_x(Point x, Point y, MutablePoint out) const = 0;
  virtual void grad_y(Point x, Point y, MutablePoint out) const = 0;
  virtual PayoffRegularity regularity() const { return {}; }

  // out[i] = (1/|Y|) sum_m grad_x Q(at[i], Y[m]). The default is the direct
  // double loop with opponents summed in index order; overrides must return
  // the same quantity.
  virtual void mean_grad_x(const ParticleSet& at, const ParticleSet& y, FieldBuffer& out,
                           int threads) const;
  // out[i] = (1/|X|) sum_m grad_y Q(X[m], at[i]).
  virtual void mean_grad_y(const ParticleSet& x, const ParticleSet& at, FieldBuffer& out,
                           int threads) const;
};

using PayoffPtr = std::shared_ptr<const Payoff>;

// Q(x, y) = 1 / (1 + exp(-|x - y|^2)).
class SigmoidPayoff final : public Payoff {
 public:
  explicit SigmoidPayoff(std::size_t dim = 1) : dim_(dim) {}
  std::string name() const override { return "sigmoid"; }
  std::size_t dim_x() const override { return dim_; }
  std::size_t dim_y() const override { return dim_; }
  double value(Point x, Point y) const override;
  void grad_x(Point x, Point y, MutablePoint out) const override;
  void grad_y(Point x, Point y, MutablePoint out) const override;
  PayoffRegularity regularity() const override;
  void mean_grad_x(const ParticleSet& at, const ParticleSet& y, FieldBuffer& out,
                   int threads) const override;
  void mean_grad_y(const ParticleSet& x, const ParticleSet& at, FieldBuffer& out,
                   int threads) const override;

 private:
  std::size_t dim_;
};

// Q(x, y) = <x, y>.
class QuadraticPayoff final : public Payoff {
 public:
  explicit QuadraticPayoff(std::size_t dim = 1) : dim_(dim) {}
  std::string name() const override { return "quadratic"; }
  std::size_t dim_x() const override { return dim_; }
  std::size_t dim_y() const override { return dim_; }
  double value(Point x, Point y) const override;
  void grad_x(Point x, Point y, MutablePoint out) const override;
  void grad_y(Point x, Point y, MutablePoint out) const override;
  PayoffRegularity regularity() const override;
  // grad_x Q = y, so the mean gradient is the opponent mean.
  void mean_grad_x(const ParticleSet& at, const ParticleSet& y, FieldBuffer& out,
                   int threads) const override;
  void mean_grad_y(const ParticleSet& x, const ParticleSet& at, FieldBuffer& out,
                   int threads) const override;

 private:
  std::size_t dim_;
};

// Q(x, y) = g(x) + h(y) for one-dimensional g, h.
class SeparablePayoff final : public Payoff {
 public:
  using ScalarFn = std::function<double(double)>;

  SeparablePayoff(ScalarFn g, ScalarFn dg, ScalarFn h, ScalarFn dh, std::string label = "separable",
                  PayoffRegularity regularity = {});

  // g(x) = slope_g x + wave_g sin(x), h(y) = slope_h y + wave_h sin(y).
  static std::shared_ptr<SeparablePayoff> linear_wave(double slope_g, double wave_g,
                                                      double slope_h, double wave_h);

  std::string name() const override { return label_; }
  std::size_t dim_x() const override { return 1; }
  std::size_t dim_y() const override { return 1; }
  double value(Point x, Point y) const override;
  void grad_x(Point x, Point y, MutablePoint out) const override;
  void grad_y(Point x, Point y, MutablePoint out) const override;
  PayoffRegularity regularity() const override { return regularity_; }
  void mean_grad_x(const ParticleSet& at, const ParticleSet& y, FieldBuffer& out,
                   int threads) const override;
  void mean_grad_y(const ParticleSet& x, const ParticleSet& at, FieldBuffer& out,
                   int threads) const override;

  double g(double x) const { return g_(x); }
  double h(double y) const { return h_(y); }

 private:
  ScalarFn g_, dg_, h_, dh_;
  std::string label_;
  PayoffRegularity regularity_;
};

// Payoff assembled from callables; used for user kernels and for the
// Bellman kernels of the Markov-game scheme.
class CallbackPayoff final : public Payoff {
 public:
  using ValueFn = std::function<double(Point, Point)>;
  using GradFn = std::function<void(Point, Point, MutablePoint)>;

  CallbackPayoff(std::string label, std::size_t dim_x, std::size_t dim_y, ValueFn value,
                 GradFn grad_x, GradFn grad_y, PayoffRegularity regularity = {});

  std::string name() const override { return label_; }
  std::size_t dim_x() const override { return dim_x_; }
  std::size_t dim_y() const override { return dim_y_; }
  double value(Point x, Point y) const override { return value_(x, y); }
  void grad_x(Point x, Point y, MutablePoint out) const override { grad_x_(x, y, out); }
  void grad_y(Point x, Point y, MutablePoint out) const override { grad_y_(x, y, out); }
  PayoffRegularity regularity() const override { return regularity_; }

 private:
  std::string label_;
  std::size_t dim_x_, dim_y_;
  ValueFn value_;
  GradFn grad_x_, grad_y_;
  PayoffRegularity regularity_;
};

}  // namespace mfl
