#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace oracle {

double w1_brute_force(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("sizes");
  std::vector<std::size_t> perm(y.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) total += std::abs(x[i] - y[perm[i]]);
    best = std::min(best, total / static_cast<double>(x.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

GaussianPair quadratic_mne(double temperature, double start_mu, double start_nu) {
  // A linear tilt of N(0, 1) by exp(-a x) is N(-a, 1): the variances never
  // move, only the means.
  const double omega = 0.1;
  double m = start_mu, n = start_nu;
  int it = 0;
  for (; it < 100000; ++it) {
    const double m_next = (1 - omega) * m + omega * (-n / temperature);
    const double n_next = (1 - omega) * n + omega * (m / temperature);
    const double change = std::max(std::abs(m_next - m), std::abs(n_next - n));
    m = m_next;
    n = n_next;
    if (change < 1e-15) break;
  }
  return {m, 1.0, n, 1.0, it};
}

double normal_quantile(double p, double mean, double sd) {
  return boost::math::quantile(boost::math::normal_distribution<double>(mean, sd), p);
}

Density::Density(std::function<double(double)> log_density, double lower, double upper,
                 std::size_t cells)
    : log_density_(std::move(log_density)), lower_(lower), upper_(upper), cells_(cells) {
  const double h = (upper_ - lower_) / static_cast<double>(cells_);
  shift_ = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= 2 * cells_; ++i) {
    shift_ = std::max(shift_, log_density_(lower_ + 0.5 * h * static_cast<double>(i)));
  }
  const auto f = [&](double x) { return std::exp(log_density_(x) - shift_); };
  cumulative_.assign(cells_ + 1, 0.0);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < cells_; ++i) {
    const double a = lower_ + h * static_cast<double>(i);
    acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
    cumulative_[i + 1] = static_cast<double>(acc);
  }
  const double total = cumulative_.back();
  for (double& c : cumulative_) c /= total;
  log_z_ = shift_ + std::log(total);
}

double Density::log_pdf(double x) const { return log_density_(x) - log_z_; }
double Density::pdf(double x) const { return std::exp(log_pdf(x)); }

double Density::integrate(const std::function<double(double)>& g) const {
  const double h = (upper_ - lower_) / static_cast<double>(cells_);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < cells_; ++i) {
    const double a = lower_ + h * static_cast<double>(i);
    const double m = a + 0.5 * h, b = a + h;
    acc += h / 6.0 * (pdf(a) * g(a) + 4.0 * pdf(m) * g(m) + pdf(b) * g(b));
  }
  return static_cast<double>(acc);
}

double Density::quantile(double p) const {
  if (p <= 0.0) return lower_;
  if (p >= 1.0) return upper_;
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
  const std::size_t cell = std::max<std::ptrdiff_t>(it - cumulative_.begin(), 1) - 1;
  const double h = (upper_ - lower_) / static_cast<double>(cells_);
  double a = lower_ + h * static_cast<double>(cell), b = a + h;
  const double base = cumulative_[cell];
  const double x0 = a;
  // CDF inside the cell by Simpson on [x0, t]; bisection to 1e-13.
  const auto partial = [&](double t) {
    const double m = 0.5 * (x0 + t);
    return base + (t - x0) / 6.0 * (pdf(x0) + 4.0 * pdf(m) + pdf(t));
  };
  for (int i = 0; i < 80 && b - a > 1e-13; ++i) {
    const double mid = 0.5 * (a + b);
    (partial(mid) < p ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

double w1_to_density(std::vector<double> x, const Density& d) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  long double total = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += std::abs(x[i] - d.quantile((static_cast<double>(i) + 0.5) / n));
  }
  return static_cast<double>(total / n);
}

double kl(const Density& p, const Density& q) {
  return p.integrate([&](double x) { return p.log_pdf(x) - q.log_pdf(x); });
}

LsiBranches lsi_branches(long double r, long double R, long double M, long double lambda,
                         long double d) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double ratio = M * M / (r * lambda * lambda);
  const long double expo = 0.5L * r * std::exp(-4.0L * ratio * std::sqrt(2.0L * d / pi));
  const long double lead = M / (r * lambda) + std::sqrt(2.0L / r);
  const long double bracket = 2.0L + 0.5L * d * std::log(std::exp(2.0L) * R / r) + 4.0L * ratio;
  const long double poly =
      1.0L / (4.0L / r + lead * lead * bracket * std::exp(0.5L * ratio));
  return {expo, poly};
}

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sty / stt;
  const double r2 = syy > 0.0 ? sty * sty / (stt * syy) : 1.0;
  return {my - slope * mt, slope, r2};
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of nothing");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
