// One line per acceptance criterion: "PASS name: detail" or "FAIL name: detail".
// Exits 1 when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "mfl/cli.hpp"
#include "mfl/dynamics.hpp"
#include "mfl/errors.hpp"
#include "mfl/log.hpp"
#include "mfl/markov.hpp"
#include "mfl/metrics.hpp"
#include "mfl/objective.hpp"
#include "mfl/payoff.hpp"
#include "oracles.hpp"

namespace {

using namespace mfl;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string join(const std::vector<double>& v, int digits = 4) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += fmt::format("{}{:.{}g}", i ? " " : "", v[i], digits);
  return out;
}

double w1_to_normal(const ParticleSet& p, double mean) {
  auto v = p.values();
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    total += std::abs(v[i] - oracle::normal_quantile((static_cast<double>(i) + 0.5) / n, mean));
  }
  return total / n;
}

double w1_to_quantiles(const ParticleSet& p, const std::vector<double>& q) {
  auto v = p.values();
  std::sort(v.begin(), v.end());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) total += std::abs(v[i] - q[i]);
  return total / static_cast<double>(v.size());
}

RunConfig quadratic_run(std::uint64_t seed) {
  RunConfig cfg;
  cfg.temperature = 0.5;
  cfg.step = 0.05;
  cfg.particles = 2000;
  cfg.epochs = 2000;
  cfg.weight_exponent = 1.0;
  cfg.seed = seed;
  cfg.abr = {50, 20, 0.15, true};
  return cfg;
}

// --- quadratic_recovery ------------------------------------------------------

Outcome quadratic_recovery() {
  const auto mne = oracle::quadratic_mne(0.5);
  const auto problem = MinimaxProblem::bilinear(std::make_shared<QuadraticPayoff>());
  std::vector<double> ag_mu, ag_nu, abr_mu, abr_nu;
  double slowest = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RunConfig cfg = quadratic_run(seed);
    auto t0 = Clock::now();
    const auto ag = run_experiment(Algorithm::kAveragedGradient, problem, cfg, cfg.epochs);
    slowest = std::max(slowest, seconds_since(t0));
    ag_mu.push_back(w1_to_normal(ag.x_out, mne.mean_mu));
    ag_nu.push_back(w1_to_normal(ag.y_out, mne.mean_nu));
    t0 = Clock::now();
    const auto abr =
        run_experiment(Algorithm::kAnchoredBestResponse, problem, cfg, total_epochs(Algorithm::kAnchoredBestResponse, cfg));
    slowest = std::max(slowest, seconds_since(t0));
    abr_mu.push_back(w1_to_normal(abr.x_out, mne.mean_mu));
    abr_nu.push_back(w1_to_normal(abr.y_out, mne.mean_nu));
  }
  const double tol = 0.1;
  const std::vector<double> med{oracle::median(ag_mu), oracle::median(ag_nu),
                                oracle::median(abr_mu), oracle::median(abr_nu)};
  const bool pass =
      std::all_of(med.begin(), med.end(), [&](double m) { return m <= tol; }) && slowest <= 120.0;
  return {pass, fmt::format("oracle MNE means ({:.1e}, {:.1e}); median W1 ag mu/nu {} abr mu/nu {} "
                            "(tol {}); slowest run {:.1f}s (limit 120s)",
                            mne.mean_mu, mne.mean_nu, join({med[0], med[1]}),
                            join({med[2], med[3]}), tol, slowest)};
}

// --- ni_decay ---------------------------------------------------------------

Outcome ni_decay() {
  const auto problem = MinimaxProblem::bilinear(std::make_shared<QuadraticPayoff>());
  std::vector<double> ratios;
  for (std::uint64_t seed = 1; seed <= 11; ++seed) {
    RunConfig cfg = quadratic_run(seed);
    ParticleSet x = sample_base(problem.base_mu, cfg.particles, seed, StreamTag::kInitMu);
    ParticleSet y = sample_base(problem.base_nu, cfg.particles, seed, StreamTag::kInitNu);
    for (double& v : x.coordinates()) v += 1.0;
    for (double& v : y.coordinates()) v -= 1.0;
    cfg.init_mu = x;
    cfg.init_nu = y;
    const auto t = run_experiment(Algorithm::kAveragedGradient, problem, cfg, 500);
    std::map<std::int64_t, double> ni;
    for (const auto& s : t.snapshots) {
      if (s.epoch == 500 || s.epoch == 2000) {
        ni[s.epoch] = ni_quadrature(*problem.payoff(), s.x_out, s.y_out, cfg.temperature,
                                    problem.base_mu, problem.base_nu)
                          .value;
      }
    }
    ratios.push_back(ni.at(2000) / ni.at(500));
  }
  const double med = oracle::median(ratios);
  const double limit = 0.6;
  return {med <= limit, fmt::format("NI(2000)/NI(500) median {:.4f} (limit {}) over 11 seeds; "
                                    "ratios {}",
                                    med, limit, join(ratios, 3))};
}

// --- abr_linear -------------------------------------------------------------

Outcome abr_linear() {
  const double lambda = 1.0;
  const double sg = 3.0, wg = 0.5, sh = 2.0, wh = 0.5;
  const auto payoff = SeparablePayoff::linear_wave(sg, wg, sh, wh);
  const auto problem = MinimaxProblem::bilinear(payoff);
  // mu* ∝ rho exp(-g / lambda), nu* ∝ rho exp(h / lambda)
  const oracle::Density mu_star(
      [&](double x) { return -0.5 * x * x - (sg * x + wg * std::sin(x)) / lambda; }, -20.0, 20.0);
  const oracle::Density nu_star(
      [&](double y) { return -0.5 * y * y + (sh * y + wh * std::sin(y)) / lambda; }, -20.0, 20.0);

  RunConfig cfg;
  cfg.temperature = lambda;
  cfg.step = 0.05;
  cfg.particles = 4000;
  cfg.abr = {40, 100, 0.15, true};
  std::vector<double> qmu(cfg.particles), qnu(cfg.particles);
  for (int i = 0; i < cfg.particles; ++i) {
    const double p = (i + 0.5) / cfg.particles;
    qmu[i] = mu_star.quantile(p);
    qnu[i] = nu_star.quantile(p);
  }
  std::vector<double> slopes, r2s, first, last;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    const auto outer = mfl_abr_run(problem, cfg);
    std::vector<double> t, logs;
    for (std::size_t k = 5; k <= 30; ++k) {
      const double gap =
          w1_to_quantiles(outer[k].first, qmu) + w1_to_quantiles(outer[k].second, qnu);
      t.push_back(static_cast<double>(k));
      logs.push_back(std::log(gap));
    }
    const auto fit = oracle::fit_line(t, logs);
    slopes.push_back(fit.slope);
    r2s.push_back(fit.r_squared);
    first.push_back(std::exp(logs.front()));
    last.push_back(std::exp(logs.back()));
  }
  const double slope = oracle::median(slopes), r2 = oracle::median(r2s);
  const bool decays = oracle::median(last) < oracle::median(first);
  const bool pass = slope < 0.0 && r2 >= 0.8 && decays;
  return {pass, fmt::format("log W1 gap over outer 5..30: median slope {:.4f} (< 0), median R^2 "
                            "{:.4f} (>= 0.8); median gap {:.4g} -> {:.4g}",
                            slope, r2, oracle::median(first), oracle::median(last))};
}

// --- figure1_ordering -------------------------------------------------------

Outcome figure1_ordering() {
  const auto base = cli::preset("figure1");
  const auto problem = cli::build_problem(base);
  const std::array<Algorithm, 3> algs{Algorithm::kAveragedGradient,
                                      Algorithm::kAnchoredBestResponse, Algorithm::kDescentAscent};
  bool finite = true;
  std::map<Algorithm, std::vector<double>> early_mu, early_nu, late_mu, late_nu;
  std::vector<double> ni_ag, ni_abr, ni_da;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig cfg = cli::build_run(base, problem);
    cfg.seed = seed;
    std::vector<Trajectory> runs;
    for (const auto a : algs) {
      try {
        runs.push_back(run_experiment(a, problem, cfg, base.snapshot_every));
      } catch (const NumericalFailure&) {
        finite = false;
        runs.emplace_back();
      }
    }
    if (!finite) break;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& steps = runs[i].steps;
      const auto at100 = std::find_if(steps.begin(), steps.end(),
                                      [](const StepDistance& s) { return s.epoch == 100; });
      early_mu[algs[i]].push_back(at100->w1_mu);
      early_nu[algs[i]].push_back(at100->w1_nu);
      late_mu[algs[i]].push_back(steps.back().w1_mu);
      late_nu[algs[i]].push_back(steps.back().w1_nu);
      finite = finite && runs[i].x_out.all_finite() && runs[i].y_out.all_finite();
    }
    std::vector<CandidatePair> c;
    for (const auto& r : runs) c.push_back({&r.x_out, &r.y_out});
    const auto ni = ni_three_point(*problem.payoff(), c, cfg.temperature, problem.base_mu,
                                   problem.base_nu);
    ni_ag.push_back(ni[0]);
    ni_abr.push_back(ni[1]);
    ni_da.push_back(ni[2]);
  }
  const double elapsed = seconds_since(t0);
  if (!finite) return {false, "a run produced non-finite particles"};

  bool decay = true;
  std::string steps;
  for (const auto a : algs) {
    const double e_mu = oracle::median(early_mu[a]), e_nu = oracle::median(early_nu[a]);
    const double l_mu = oracle::median(late_mu[a]), l_nu = oracle::median(late_nu[a]);
    const bool ok = l_mu < e_mu && l_nu < e_nu;
    decay = decay && ok;
    steps += fmt::format(" {} mu {:.4g}->{:.4g} nu {:.4g}->{:.4g}{};", algorithm_tag(a), e_mu,
                         l_mu, e_nu, l_nu, ok ? "" : " (no decay)");
  }
  const double ag = oracle::median(ni_ag), da = oracle::median(ni_da);
  const bool order = ag <= da;
  const bool pass = finite && decay && order && elapsed <= 600.0;
  return {pass, fmt::format("(i) finite; (ii) median step W1 epoch 100 -> final:{} (iii) median "
                            "3-point NI ag {:.4g} abr {:.4g} da {:.4g}, ag <= da {}; {:.0f}s "
                            "(limit 600s)",
                            steps, ag, oracle::median(ni_abr), da, order ? "holds" : "violated",
                            elapsed)};
}

// --- history_equivalence ----------------------------------------------------

// The rolling reservoirs replaced by the exact B_k-weighted mixture: with
// integer weights beta_j, snapshot j repeated beta_j times.
ParticleSet weighted_concatenation(const std::vector<ParticleSet>& history,
                                   const std::vector<double>& weights) {
  std::vector<double> rows;
  std::size_t n = 0;
  for (std::size_t j = 0; j < history.size(); ++j) {
    const auto copies = static_cast<std::size_t>(std::llround(weights[j]));
    for (std::size_t c = 0; c < copies; ++c) {
      const auto v = history[j].coordinates();
      rows.insert(rows.end(), v.begin(), v.end());
      n += history[j].size();
    }
  }
  return ParticleSet(n, history.front().dim(), std::move(rows));
}

Outcome history_equivalence() {
  double worst = 0.0;
  int cases = 0;
  const std::vector<PayoffPtr> payoffs{std::make_shared<QuadraticPayoff>(),
                                       std::make_shared<SigmoidPayoff>()};
  for (const auto& q : payoffs) {
    for (const double r : {0.0, 1.0}) {
      const auto problem = MinimaxProblem::bilinear(q);
      RunConfig cfg;
      cfg.temperature = 0.1;
      cfg.step = 0.1;
      cfg.particles = 8;
      cfg.epochs = 20;
      cfg.weight_exponent = r;
      cfg.seed = 11;
      cfg.ag_mode = AgMode::kHistory;
      AgState state = make_ag_state(problem, cfg);
      for (int step = 0; step < 20; ++step) {
        mfl_ag_step(state, problem, cfg);
        AgState rolling = state;
        rolling.mode = AgMode::kRolling;
        rolling.x_bar = weighted_concatenation(state.history_x, state.history_weights);
        rolling.y_bar = weighted_concatenation(state.history_y, state.history_weights);
        const auto h = ag_drift(state, problem, 1);
        const auto g = ag_drift(rolling, problem, 1);
        for (std::size_t i = 0; i < h.mu.coordinates().size(); ++i) {
          worst = std::max(worst, std::abs(h.mu.coordinates()[i] - g.mu.coordinates()[i]));
          worst = std::max(worst, std::abs(h.nu.coordinates()[i] - g.nu.coordinates()[i]));
        }
        ++cases;
      }
    }
  }
  const double tol = 1e-12;
  return {worst <= tol, fmt::format("max |history - rolling| drift over {} steps (quadratic, "
                                    "sigmoid; r = 0, 1): {:.3e} (tol {:.0e})",
                                    cases, worst, tol)};
}

// --- markov_contraction -----------------------------------------------------

std::shared_ptr<MarkovGame> constant_game(double c, double gamma) {
  auto game = std::make_shared<MarkovGame>();
  game->states = {"a", "b"};
  game->reward = RewardModel::constant({c, c});
  game->transition = TransitionModel::constant({{0.5, 0.5}, {0.5, 0.5}});
  game->discount = gamma;
  game->temperature = 0.0;
  return game;
}

Outcome markov_contraction() {
  const double c = 1.0, gamma = 0.9;
  const double v_star = c / (1.0 - gamma);
  const auto game = constant_game(c, gamma);
  SchemeConfig cfg;
  cfg.solver = Algorithm::kAveragedGradient;
  cfg.run.temperature = 0.0;
  cfg.run.step = 0.1;
  cfg.run.particles = 50;
  cfg.run.epochs = 20;
  cfg.rounds = 10;
  const auto exact = run_scheme(game, cfg, 3);
  double at10 = 0.0, worst_ratio = 0.0;
  for (std::size_t k = 0; k < exact.iterates.size(); ++k) {
    const auto& v = exact.iterates[k].values;
    const double err = std::max(std::abs(v[0] - v_star), std::abs(v[1] - v_star));
    if (k == 10) at10 = err;
    if (k > 0) {
      const auto& p = exact.iterates[k - 1].values;
      const double prev = std::max(std::abs(p[0] - v_star), std::abs(p[1] - v_star));
      worst_ratio = std::max(worst_ratio, err / prev);
    }
  }
  const double tol = 0.05;
  const bool reached = at10 <= tol;

  SchemeConfig noisy = cfg;
  noisy.rounds = 150;
  noisy.noise = {BellmanNoise::Mode::kWorstCase, 0.1};
  const auto floor_run = run_scheme(game, noisy, 3);
  const auto& vf = floor_run.iterates.back().values;
  const double floor_gap = std::max(std::abs(vf[0] - v_star), std::abs(vf[1] - v_star));
  const double floor_limit = (cfg.ni_tolerance + 0.1) / (1.0 - gamma) + 0.05;
  const bool floor_ok = floor_gap <= floor_limit;
  return {reached && floor_ok,
          fmt::format("|V^(10) - c/(1-gamma)| = {:.4f} (tol {}, requires {}) from V^(0) = 0, c = "
                      "1; per-round error ratio <= {:.6f} (gamma {}); eps_Q = 0.1 floor after "
                      "{} rounds {:.4f} (limit {:.4f})",
                      at10, tol, reached ? "met" : "not met", worst_ratio, gamma, noisy.rounds,
                      floor_gap, floor_limit)};
}

// --- metric_properties ------------------------------------------------------

struct Check {
  std::string name;
  bool ok;
  std::string value;
};

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

Check w1_brute_force_check() {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> x(n), y(n);
      for (auto& v : x) v = nd(gen);
      for (auto& v : y) v = nd(gen) * 2.0 + 0.5;
      const double got = w1_empirical_1d(ParticleSet::from_values(x), ParticleSet::from_values(y));
      worst = std::max(worst, std::abs(got - oracle::w1_brute_force(x, y)));
    }
  }
  return {"w1 brute force n<=6", worst <= 1e-12, fmt::format("{:.2e}", worst)};
}

Check w1_axioms_check() {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> size(1, 30);
  double triangle = 0.0, symmetry = 0.0, identity = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = size(gen);
    std::vector<double> a(n), b(n), c(n);
    for (int i = 0; i < n; ++i) {
      a[i] = nd(gen);
      b[i] = 3.0 * nd(gen);
      c[i] = nd(gen) + 1.0;
    }
    const auto A = ParticleSet::from_values(a), B = ParticleSet::from_values(b),
               C = ParticleSet::from_values(c);
    auto shuffled = a;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const double ab = w1_empirical_1d(A, B), ba = w1_empirical_1d(B, A);
    const double bc = w1_empirical_1d(B, C), ac = w1_empirical_1d(A, C);
    symmetry = std::max(symmetry, std::abs(ab - ba));
    triangle = std::max(triangle, ac - (ab + bc));
    identity = std::max(identity, w1_empirical_1d(A, ParticleSet::from_values(shuffled)));
  }
  const bool ok = symmetry == 0.0 && triangle <= 1e-12 && identity == 0.0;
  return {"w1 metric axioms x1000", ok,
          fmt::format("sym {:.1e} tri {:.1e} id {:.1e}", symmetry, triangle, identity)};
}

double fd(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

Check gradient_check() {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  const std::vector<PayoffPtr> payoffs{std::make_shared<SigmoidPayoff>(),
                                       std::make_shared<QuadraticPayoff>(),
                                       SeparablePayoff::linear_wave(1.5, 0.7, -0.4, 1.2)};
  for (const auto& q : payoffs) {
    for (int t = 0; t < 50; ++t) {
      const double x = 2.0 * nd(gen), y = 2.0 * nd(gen);
      double gx = 0.0, gy = 0.0;
      q->grad_x(Point(&x, 1), Point(&y, 1), MutablePoint(&gx, 1));
      q->grad_y(Point(&x, 1), Point(&y, 1), MutablePoint(&gy, 1));
      const double fx = fd([&](double u) { return q->value(Point(&u, 1), Point(&y, 1)); }, x);
      const double fy = fd([&](double u) { return q->value(Point(&x, 1), Point(&u, 1)); }, y);
      worst = std::max({worst, relative_error(gx, fx), relative_error(gy, fy)});
    }
    // First-variation drift of the objective against bilinear_value.
    const BilinearObjective objective(q);
    std::vector<double> xs(7), ys(5);
    for (auto& v : xs) v = nd(gen);
    for (auto& v : ys) v = nd(gen);
    const auto X = ParticleSet::from_values(xs), Y = ParticleSet::from_values(ys);
    FieldBuffer gmu(X.size(), 1), gnu(Y.size(), 1);
    objective.grad_mu(X, X, Y, gmu, 1);
    objective.grad_nu(Y, X, Y, gnu, 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double f = fd(
          [&](double u) {
            const auto Z = ParticleSet::from_values({u});
            return bilinear_value(*q, Z, Y);
          },
          xs[i]);
      worst = std::max(worst, relative_error(gmu.coordinates()[i], f));
    }
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const double f = fd(
          [&](double u) {
            const auto Z = ParticleSet::from_values({u});
            return bilinear_value(*q, X, Z);
          },
          ys[i]);
      worst = std::max(worst, relative_error(gnu.coordinates()[i], f));
    }
  }
  const auto base = BaseMeasure::standard_gaussian();
  for (int t = 0; t < 50; ++t) {
    const double x = 2.0 * nd(gen);
    double g = 0.0;
    base.grad_potential(Point(&x, 1), MutablePoint(&g, 1));
    const double f = fd([&](double u) { return -base.log_density(u); }, x);
    worst = std::max(worst, relative_error(g, f));
  }
  const double tol = 1e-5;
  return {"gradients vs finite differences", worst <= tol, fmt::format("{:.2e}", worst)};
}

Check lsi_check() {
  bool positive = true, bounded = true, monotone = true;
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const double m = 0.05 * (i + 1);
    const double v = lsi_lower_bound(1.0, 2.0, m, 0.7, 1.0);
    positive = positive && v > 0.0;
    bounded = bounded && v <= 0.5;
    monotone = monotone && v <= previous;
    previous = v;
  }
  for (const double r : {0.1, 1.0, 3.0}) {
    for (const double lambda : {0.01, 0.1, 1.0, 10.0}) {
      for (const double d : {1.0, 2.0, 5.0}) {
        const double log_v = lsi_log_lower_bound(r, 2.0 * r, 1.0, lambda, d);
        const double v = lsi_lower_bound(r, 2.0 * r, 1.0, lambda, d);
        positive = positive && std::isfinite(log_v) &&
                   (log_v < std::log(std::numeric_limits<double>::min()) || v > 0.0);
        bounded = bounded && log_v <= std::log(0.5 * r) + 1e-15;
      }
    }
  }
  const auto b = oracle::lsi_branches(1, 1, 1, 1, 1);
  const double expected = static_cast<double>(std::max(b.exponential, b.polynomial));
  const double spot = lsi_lower_bound(1, 1, 1, 1, 1);
  const bool spot_ok = std::abs(spot - expected) <= 1e-12 && std::abs(spot - 0.0206) < 5e-4 &&
                       b.exponential > b.polynomial;
  const double limit = lsi_lower_bound(1.0, 1.0, 1e-6, 1.0, 1.0);
  const bool limit_ok = std::abs(limit - 0.5) <= 1e-9;
  return {"lsi bound", positive && bounded && monotone && spot_ok && limit_ok,
          fmt::format("spot {:.10f} oracle {:.10f}; M->0 {:.10f}; positive {} <= r/2 {} "
                      "monotone {}",
                      spot, expected, limit, positive, bounded, monotone)};
}

Check entropy_sandwich_check() {
  const double lambda = 0.7;
  const double sg = 1.2, wg = 0.8, sh = -0.6, wh = 0.5;
  const auto q = SeparablePayoff::linear_wave(sg, wg, sh, wh);
  const auto base = BaseMeasure::standard_gaussian();
  const double lo = -12.0, hi = 12.0;
  const auto g = [&](double x) { return sg * x + wg * std::sin(x); };
  const auto h = [&](double y) { return sh * y + wh * std::sin(y); };
  const oracle::Density mu_star([&](double x) { return -0.5 * x * x - g(x) / lambda; }, lo, hi);
  const oracle::Density nu_star([&](double y) { return -0.5 * y * y + h(y) / lambda; }, lo, hi);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 20; ++t) {
    const double a1 = u(gen), s1 = 0.5 + 0.5 * (u(gen) + 1.0), c1 = 0.6 * u(gen);
    const double a2 = u(gen), s2 = 0.5 + 0.5 * (u(gen) + 1.0), c2 = 0.6 * u(gen);
    const auto lmu = [=](double x) { return -0.5 * (x - a1) * (x - a1) / (s1 * s1) + c1 * std::cos(2 * x); };
    const auto lnu = [=](double y) { return -0.5 * (y - a2) * (y - a2) / (s2 * s2) + c2 * std::sin(y); };
    const oracle::Density mu(lmu, lo, hi), nu(lnu, lo, hi);
    const double kl_sum = oracle::kl(mu, mu_star) + oracle::kl(nu, nu_star);
    const auto gm = GibbsQuadrature::from_log_density(lo, hi, 2049, lmu);
    const auto gn = GibbsQuadrature::from_log_density(lo, hi, 2049, lnu);
    const double ni = ni_quadrature_density(*q, gm, gn, lambda, base, base);
    worst = std::max(worst, kl_sum - ni / lambda);
  }
  const double tol = 1e-6;
  return {"entropy sandwich x20", worst <= tol,
          fmt::format("max KL sum - NI/lambda {:.2e} (tol {:.0e})", worst, tol)};
}

Check kde_shift_check() {
  const auto base = BaseMeasure::standard_gaussian();
  ParticleSet x = sample_base(base, 10000, 21, StreamTag::kUser);
  for (double& v : x.coordinates()) v += 1.0;
  const double est = kl_empirical_kde(x, base);
  return {"kde kl shift", std::abs(est - 0.5) <= 0.1, fmt::format("{:.4f} vs 0.5", est)};
}

Outcome metric_properties() {
  const std::vector<Check> checks{w1_brute_force_check(), w1_axioms_check(), gradient_check(),
                                  lsi_check(),           entropy_sandwich_check(),
                                  kde_shift_check()};
  bool pass = true;
  std::string detail;
  for (const auto& c : checks) {
    pass = pass && c.ok;
    detail += fmt::format("{}[{}: {}]", detail.empty() ? "" : " ", c.name,
                          (c.ok ? "ok, " : "FAILED, ") + c.value);
  }
  return {pass, detail};
}

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"quadratic_recovery", quadratic_recovery}, {"ni_decay", ni_decay},
      {"abr_linear", abr_linear},                 {"figure1_ordering", figure1_ordering},
      {"history_equivalence", history_equivalence},
      {"markov_contraction", markov_contraction}, {"metric_properties", metric_properties},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<std::string> only;
  bool list = false;
  app.add_option("--only", only, "run only the named criteria");
  app.add_flag("--list", list, "print criterion names");
  CLI11_PARSE(app, argc, argv);
  mfl::set_quiet(true);

  if (list) {
    for (const auto& c : criteria()) std::cout << c.name << '\n';
    return 0;
  }
  for (const auto& name : only) {
    const auto& all = criteria();
    if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return c.name == name; })) {
      std::cerr << "unknown criterion " << name << '\n';
      return 2;
    }
  }
  int failed = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail
              << fmt::format(" [{:.1f}s]", seconds_since(t0)) << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
