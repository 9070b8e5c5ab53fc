#include "mfl/payoff.hpp"

#include <cmath>
#include <vector>

#include "mfl/errors.hpp"
#include "mfl/parallel.hpp"

namespace mfl {
namespace {

void check_field_shapes(const ParticleSet& at, std::size_t dim, const ParticleSet& opponents,
                        std::size_t opponent_dim, const FieldBuffer& out) {
  require(at.dim() == dim, "evaluation points do not match the payoff dimension");
  require(opponents.dim() == opponent_dim, "opponent particles do not match the payoff dimension");
  require(!opponents.empty(), "opponent particle set is empty");
  require(out.size() == at.size() && out.dim() == at.dim(), "output field has the wrong shape");
}

}  // namespace

void Payoff::mean_grad_x(const ParticleSet& at, const ParticleSet& y, FieldBuffer& out,
                         int threads) const {
  check_field_shapes(at, dim_x(), y, dim_y(), out);
  const double n = static_cast<double>(y.size());
  parallel_for(at.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> sum(dim_x()), grad(dim_x());
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(sum.begin(), sum.end(), 0.0);
      for (std::size_t m = 0; m < y.size(); ++m) {
        grad_x(at[i], y[m], grad);
        for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += grad[c];
      }
      for (std::size_t c = 0; c < sum.size(); ++c) out[i][c] = sum[c] / n;
    }
  });
}

void Payoff::mean_grad_y(const ParticleSet& x, const ParticleSet& at, FieldBuffer& out,
                         int threads) const {
  check_field_shapes(at, dim_y(), x, dim_x(), out);
  const double n = static_cast<double>(x.size());
  parallel_for(at.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> sum(dim_y()), grad(dim_y());
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(sum.begin(), sum.end(), 0.0);
      for (std::size_t m = 0; m < x.size(); ++m) {
        grad_y(x[m], at[i], grad);
        for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += grad[c];
      }
      for (std::size_t c = 0; c < sum.size(); ++c) out[i][c] = sum[c] / n;
    }
  });
}

// --- sigmoid ---------------------------------------------------------------

namespace {

inline double squared_distance(Point x, Point y) {
  double u = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double d = x[c] - y[c];
    u += d * d;
  }
  return u;
}

// dQ/du * 2 for Q = 1 / (1 + exp(-u)).
inline double sigmoid_slope(double u) {
  const double q = 1.0 / (1.0 + std::exp(-u));
  return 2.0 * q * (1.0 - q);
}

// Sum over opponents of sign * slope(u) * (a - b) for scalar particles.
double sigmoid_sum_1d(double a, std::span<const double> others) {
  double sum = 0.0;
  for (const double b : others) {
    const double d = a - b;
    sum += sigmoid_slope(d * d) * d;
  }
  return sum;
}

}  // namespace

double SigmoidPayoff::value(Point x, Point y) const {
  return 1.0 / (1.0 + std::exp(-squared_distance(x, y)));
}

void SigmoidPayoff::grad_x(Point x, Point y, MutablePoint out) const {
  const double slope = sigmoid_slope(squared_distance(x, y));
  for (std::size_t c = 0; c < x.size(); ++c) out[c] = slope * (x[c] - y[c]);
}

void SigmoidPayoff::grad_y(Point x, Point y, MutablePoint out) const {
  const double slope = sigmoid_slope(squared_distance(x, y));
  for (std::size_t c = 0; c < x.size(); ++c) out[c] = slope * (y[c] - x[c]);
}

PayoffRegularity SigmoidPayoff::regularity() const {
  // sup_s 2 s q(1 - q) with q = sigmoid(s^2), and its slope at s = 0.
  constexpr double kGradBound = 0.3935458907110708;
  constexpr double kLipschitz = 0.5;
  PayoffRegularity reg;
  reg.grad_bound_mu = reg.grad_bound_nu = kGradBound;
  reg.lip_mu = reg.lip_nu = kLipschitz * std::sqrt(static_cast<double>(dim_));
  reg.cross_lip_mu = reg.cross_lip_nu = kLipschitz * std::sqrt(static_cast<double>(dim_));
  reg.sup_bound = 1.0;
  return reg;
}

void SigmoidPayoff::mean_grad_x(const ParticleSet& at, const ParticleSet& y, FieldBuffer& out,
                                int threads) const {
  if (dim_ != 1) {
    Payoff::mean_grad_x(at, y, out, threads);
    return;
  }
  check_field_shapes(at, 1, y, 1, out);
  const auto others = y.coordinates();
  const double n = static_cast<double>(y.size());
  parallel_for(at.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i][0] = sigmoid_sum_1d(at[i][0], others) / n;
  });
}

void SigmoidPayoff::mean_grad_y(const ParticleSet& x, const ParticleSet& at, FieldBuffer& out,
                                int threads) const {
  if (dim_ != 1) {
    Payoff::mean_grad_y(x, at, out, threads);
    return;
  }
  check_field_shapes(at, 1, x, 1, out);
  const auto others = x.coordinates();
  const double n = static_cast<double>(x.size());
  parallel_for(at.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i][0] = sigmoid_sum_1d(at[i][0], others) / n;
  });
}

// --- quadratic -------------------------------------------------------------

double QuadraticPayoff::value(Point x, Point y) const {
  double s = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) s += x[c] * y[c];
  return s;
}

void QuadraticPayoff::grad_x(Point, Point y, MutablePoint out) const {
  std::copy(y.begin(), y.end(), out.begin());
}

void QuadraticPayoff::grad_y(Point x, Point, MutablePoint out) const {
  std::copy(x.begin(), x.end(), out.begin());
}

PayoffRegularity QuadraticPayoff::regularity() const {
  PayoffRegularity reg;
  reg.lip_mu = reg.lip_nu = 0.0;
  reg.cross_lip_mu = reg.cross_lip_nu = 1.0;
  return reg;
}

namespace {

std::vector<double> mean_row(const ParticleSet& set) {
  std::vector<double> mean(set.dim(), 0.0);
  for (std::size_t m = 0; m < set.size(); ++m) {
    for (std::size_t c = 0; c < set.dim(); ++c) mean[c] += set[m][c];
  }
  for (double& v : mean) v /= static_cast<double>(set.size());
  return mean;
}

}  // namespace

void QuadraticPayoff::mean_grad_x(const ParticleSet& at, const ParticleSet& y, FieldBuffer& out,
                                  int) const {
  check_field_shapes(at, dim_, y, dim_, out);
  const auto mean = mean_row(y);
  for (std::size_t i = 0; i < at.size(); ++i) std::copy(mean.begin(), mean.end(), out[i].begin());
}

void QuadraticPayoff::mean_grad_y(const ParticleSet& x, const ParticleSet& at, FieldBuffer& out,
                                  int) const {
  check_field_shapes(at, dim_, x, dim_, out);
  const auto mean = mean_row(x);
  for (std::size_t i = 0; i < at.size(); ++i) std::copy(mean.begin(), mean.end(), out[i].begin());
}

// --- separable -------------------------------------------------------------

SeparablePayoff::SeparablePayoff(ScalarFn g, ScalarFn dg, ScalarFn h, ScalarFn dh,
                                 std::string label, PayoffRegularity regularity)
    : g_(std::move(g)),
      dg_(std::move(dg)),
      h_(std::move(h)),
      dh_(std::move(dh)),
      label_(std::move(label)),
      regularity_(regularity) {
  require(g_ && dg_ && h_ && dh_, "separable payoff needs g, g', h, h'");
}

std::shared_ptr<SeparablePayoff> SeparablePayoff::linear_wave(double slope_g, double wave_g,
                                                              double slope_h, double wave_h) {
  PayoffRegularity reg;
  reg.grad_bound_mu = std::abs(slope_g) + std::abs(wave_g);
  reg.grad_bound_nu = std::abs(slope_h) + std::abs(wave_h);
  reg.lip_mu = std::abs(wave_g);
  reg.lip_nu = std::abs(wave_h);
  reg.cross_lip_mu = reg.cross_lip_nu = 0.0;
  return std::make_shared<SeparablePayoff>(
      [=](double x) { return slope_g * x + wave_g * std::sin(x); },
      [=](double x) { return slope_g + wave_g * std::cos(x); },
      [=](double y) { return slope_h * y + wave_h * std::sin(y); },
      [=](double y) { return slope_h + wave_h * std::cos(y); }, "separable", reg);
}

double SeparablePayoff::value(Point x, Point y) const { return g_(x[0]) + h_(y[0]); }

void SeparablePayoff::grad_x(Point x, Point, MutablePoint out) const { out[0] = dg_(x[0]); }

void SeparablePayoff::grad_y(Point, Point y, MutablePoint out) const { out[0] = dh_(y[0]); }

void SeparablePayoff::mean_grad_x(const ParticleSet& at, const ParticleSet& y, FieldBuffer& out,
                                  int) const {
  check_field_shapes(at, 1, y, 1, out);
  for (std::size_t i = 0; i < at.size(); ++i) out[i][0] = dg_(at[i][0]);
}

void SeparablePayoff::mean_grad_y(const ParticleSet& x, const ParticleSet& at, FieldBuffer& out,
                                  int) const {
  check_field_shapes(at, 1, x, 1, out);
  for (std::size_t i = 0; i < at.size(); ++i) out[i][0] = dh_(at[i][0]);
}

// --- callback --------------------------------------------------------------

CallbackPayoff::CallbackPayoff(std::string label, std::size_t dim_x, std::size_t dim_y,
                               ValueFn value, GradFn grad_x, GradFn grad_y,
                               PayoffRegularity regularity)
    : label_(std::move(label)),
      dim_x_(dim_x),
      dim_y_(dim_y),
      value_(std::move(value)),
      grad_x_(std::move(grad_x)),
      grad_y_(std::move(grad_y)),
      regularity_(regularity) {
  require(value_ && grad_x_ && grad_y_, "callback payoff needs value and both gradients");
}

}  // namespace mfl
