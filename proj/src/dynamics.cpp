#include "mfl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "mfl/errors.hpp"
#include "mfl/log.hpp"
#include "mfl/metrics.hpp"
#include "mfl/parallel.hpp"

namespace mfl {

MinimaxProblem MinimaxProblem::bilinear(PayoffPtr payoff, BaseMeasure base_mu,
                                        BaseMeasure base_nu) {
  return {std::make_shared<BilinearObjective>(std::move(payoff)), std::move(base_mu),
          std::move(base_nu)};
}

void MinimaxProblem::validate() const {
  require(objective != nullptr, "minimax problem needs an objective");
  require(objective->dim_x() == base_mu.dim(),
          fmt::format("objective acts on R^{} for mu but the base lives in R^{}",
                      objective->dim_x(), base_mu.dim()));
  require(objective->dim_y() == base_nu.dim(),
          fmt::format("objective acts on R^{} for nu but the base lives in R^{}",
                      objective->dim_y(), base_nu.dim()));
}

std::pair<ParticleSet, ParticleSet> initial_particles(const MinimaxProblem& problem,
                                                      const RunConfig& cfg) {
  ParticleSet x = cfg.init_mu ? *cfg.init_mu
                              : sample_base(problem.base_mu, cfg.particles, cfg.seed,
                                            StreamTag::kInitMu);
  ParticleSet y = cfg.init_nu ? *cfg.init_nu
                              : sample_base(problem.base_nu, cfg.particles, cfg.seed,
                                            StreamTag::kInitNu);
  require(x.dim() == problem.base_mu.dim() && y.dim() == problem.base_nu.dim(),
          "initial particles do not match the base dimensions");
  return {std::move(x), std::move(y)};
}

void langevin_update(ParticleSet& p, const FieldBuffer& drift, double sign,
                     const BaseMeasure& base, const RunConfig& cfg, std::uint64_t epoch,
                     StreamTag tag) {
  const std::size_t d = p.dim();
  const double eta = cfg.step;
  const double lambda = cfg.temperature;
  const double sigma = std::sqrt(2.0 * lambda * eta);
  const bool noisy = cfg.noise && sigma > 0.0;
  parallel_for(p.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> grad_u(d);
    for (std::size_t i = begin; i < end; ++i) {
      auto xi = p[i];
      const auto g = drift[i];
      base.grad_potential(xi, grad_u);
      if (noisy) {
        CounterStream stream(cfg.seed, epoch, static_cast<std::uint32_t>(i), tag);
        for (std::size_t c = 0; c < d; ++c) {
          xi[c] = xi[c] - eta * (sign * g[c] + lambda * grad_u[c]) + sigma * stream.normal();
        }
      } else {
        for (std::size_t c = 0; c < d; ++c) {
          xi[c] = xi[c] - eta * (sign * g[c] + lambda * grad_u[c]);
        }
      }
    }
  });
}

void replace_particles(ParticleSet& target, const ParticleSet& donors, std::int64_t count,
                       CounterStream& stream) {
  require(count >= 0 && static_cast<std::size_t>(count) <= target.size() &&
              static_cast<std::size_t>(count) <= donors.size(),
          fmt::format("cannot replace {} of {} particles from {} donors", count, target.size(),
                      donors.size()));
  require(target.dim() == donors.dim(), "replacement donors have the wrong dimension");
  const auto partial_shuffle = [&](std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::int64_t t = 0; t < count; ++t) {
      const auto u = static_cast<std::size_t>(t);
      std::swap(idx[u], idx[u + stream.below(n - u)]);
    }
    idx.resize(static_cast<std::size_t>(count));
    return idx;
  };
  const auto slots = partial_shuffle(target.size());
  const auto picks = partial_shuffle(donors.size());
  for (std::size_t t = 0; t < slots.size(); ++t) {
    const auto from = donors[picks[t]];
    std::copy(from.begin(), from.end(), target[slots[t]].begin());
  }
}

namespace {

void check_finite(const ParticleSet& x, const ParticleSet& y, std::int64_t epoch,
                  const char* algorithm) {
  if (!x.all_finite() || !y.all_finite()) {
    throw NumericalFailure(
        fmt::format("{}: particles became non-finite at epoch {}", algorithm, epoch), epoch);
  }
}

FieldBuffer zero_field(const ParticleSet& like) { return FieldBuffer(like.size(), like.dim()); }

}  // namespace

// --- MFL-DA ----------------------------------------------------------------

DaState make_da_state(const MinimaxProblem& problem, const RunConfig& cfg) {
  problem.validate();
  cfg.validate(Algorithm::kDescentAscent);
  auto [x, y] = initial_particles(problem, cfg);
  return {std::move(x), std::move(y), 0};
}

void mfl_da_step(DaState& state, const MinimaxProblem& problem, const RunConfig& cfg) {
  FieldBuffer gx = zero_field(state.x);
  FieldBuffer gy = zero_field(state.y);
  problem.objective->grad_mu(state.x, state.x, state.y, gx, cfg.threads);
  problem.objective->grad_nu(state.y, state.x, state.y, gy, cfg.threads);
  const auto epoch = static_cast<std::uint64_t>(state.epoch + 1);
  langevin_update(state.x, gx, +1.0, problem.base_mu, cfg, epoch, StreamTag::kNoiseMu);
  langevin_update(state.y, gy, -1.0, problem.base_nu, cfg, epoch, StreamTag::kNoiseNu);
  ++state.epoch;
  check_finite(state.x, state.y, state.epoch, "MFL-DA");
}

// --- MFL-AG ----------------------------------------------------------------

AgState make_ag_state(const MinimaxProblem& problem, const RunConfig& cfg) {
  problem.validate();
  cfg.validate(Algorithm::kAveragedGradient);
  if (cfg.ag_mode == AgMode::kRolling) {
    require(problem.payoff() != nullptr,
            "rolling-average MFL-AG needs a bilinear objective; use history mode");
  }
  AgState s;
  auto [x, y] = initial_particles(problem, cfg);
  s.x = std::move(x);
  s.y = std::move(y);
  s.weights = CumulativeWeight(WeightingScheme(cfg.weight_exponent));
  s.mode = cfg.ag_mode;
  if (s.mode == AgMode::kRolling) {
    s.x_bar = s.x;
    s.y_bar = s.y;
  } else {
    s.history_x.push_back(s.x);
    s.history_y.push_back(s.y);
    s.history_weights.push_back(s.weights.weight());
  }
  return s;
}

DriftPair ag_drift(const AgState& state, const MinimaxProblem& problem, int threads) {
  const Objective& obj = *problem.objective;
  DriftPair out{zero_field(state.x), zero_field(state.y)};
  if (state.mode == AgMode::kRolling) {
    obj.grad_mu(state.x, state.x_bar, state.y_bar, out.mu, threads);
    obj.grad_nu(state.y, state.x_bar, state.y_bar, out.nu, threads);
    return out;
  }
  require(state.history_x.size() == static_cast<std::size_t>(state.k),
          "history length does not match the epoch");
  FieldBuffer gx = zero_field(state.x);
  FieldBuffer gy = zero_field(state.y);
  const double total = state.weights.total();
  for (std::int64_t j = 1; j <= state.k; ++j) {
    const auto& xj = state.history_x[static_cast<std::size_t>(j - 1)];
    const auto& yj = state.history_y[static_cast<std::size_t>(j - 1)];
    obj.grad_mu(state.x, xj, yj, gx, threads);
    obj.grad_nu(state.y, xj, yj, gy, threads);
    const double w = state.history_weights[static_cast<std::size_t>(j - 1)] / total;
    auto mu = out.mu.coordinates();
    auto nu = out.nu.coordinates();
    const auto ax = gx.coordinates();
    const auto ay = gy.coordinates();
    for (std::size_t c = 0; c < mu.size(); ++c) mu[c] += w * ax[c];
    for (std::size_t c = 0; c < nu.size(); ++c) nu[c] += w * ay[c];
  }
  return out;
}

void mfl_ag_step(AgState& state, const MinimaxProblem& problem, const RunConfig& cfg) {
  const DriftPair drift = ag_drift(state, problem, cfg.threads);
  const auto epoch = static_cast<std::uint64_t>(state.k);
  langevin_update(state.x, drift.mu, +1.0, problem.base_mu, cfg, epoch, StreamTag::kNoiseMu);
  langevin_update(state.y, drift.nu, -1.0, problem.base_nu, cfg, epoch, StreamTag::kNoiseNu);
  state.weights.advance();
  ++state.k;
  check_finite(state.x, state.y, state.epoch(), "MFL-AG");

  if (state.mode == AgMode::kRolling) {
    const std::int64_t count =
        weighted_count(state.weights.weight(), state.weights.total(),
                       static_cast<std::int64_t>(state.x_bar.size()));
    state.last_replacements = count;
    if (count == 0) {
      ++state.zero_replacement_steps;
      return;
    }
    const auto k1 = static_cast<std::uint64_t>(state.k);
    CounterStream sx(cfg.seed, k1, 0, StreamTag::kReplaceMu);
    CounterStream sy(cfg.seed, k1, 0, StreamTag::kReplaceNu);
    replace_particles(state.x_bar, state.x, count, sx);
    replace_particles(state.y_bar, state.y, count, sy);
  } else {
    require(state.k <= cfg.history_cap,
            fmt::format("MFL-AG history reached the cap of {} snapshots", cfg.history_cap));
    state.history_x.push_back(state.x);
    state.history_y.push_back(state.y);
    state.history_weights.push_back(state.weights.weight());
  }
}

std::vector<std::int64_t> ag_output_counts(const WeightingScheme& scheme, std::int64_t K,
                                           std::int64_t n) {
  require(K >= 1, fmt::format("averaged output needs K >= 1, got {}", K));
  CumulativeWeight cw(scheme);
  for (std::int64_t j = 1; j < K; ++j) cw.advance();
  const double total = cw.total();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(K));
  for (std::int64_t j = 1; j <= K; ++j) {
    counts[static_cast<std::size_t>(j - 1)] = weighted_count(scheme.weight(j), total, n);
  }
  return counts;
}

std::pair<ParticleSet, ParticleSet> ag_output(const AgState& state, const RunConfig& cfg) {
  if (state.mode == AgMode::kRolling) return {state.x_bar, state.y_bar};
  const WeightingScheme scheme(cfg.weight_exponent);
  const auto n = static_cast<std::int64_t>(state.x.size());
  const auto counts = ag_output_counts(scheme, state.k, n);
  const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  require(total > 0, fmt::format("averaged output is empty: every floor(beta_k N / B_K) is zero "
                                 "at N = {}, K = {}; increase N or lower r",
                                 n, state.k));
  const auto gather = [&](const std::vector<ParticleSet>& history, StreamTag tag) {
    const std::size_t d = history.front().dim();
    std::vector<double> coords;
    coords.reserve(static_cast<std::size_t>(total) * d);
    for (std::int64_t j = 1; j <= state.k; ++j) {
      const auto c = counts[static_cast<std::size_t>(j - 1)];
      if (c == 0) continue;
      const auto& snap = history[static_cast<std::size_t>(j - 1)];
      CounterStream stream(cfg.seed, static_cast<std::uint64_t>(state.k),
                           static_cast<std::uint32_t>(j), tag);
      std::vector<std::size_t> idx(snap.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (std::int64_t t = 0; t < c; ++t) {
        const auto u = static_cast<std::size_t>(t);
        std::swap(idx[u], idx[u + stream.below(snap.size() - u)]);
        const auto row = snap[idx[u]];
        coords.insert(coords.end(), row.begin(), row.end());
      }
    }
    return ParticleSet(static_cast<std::size_t>(total), d, std::move(coords));
  };
  return {gather(state.history_x, StreamTag::kOutputMu),
          gather(state.history_y, StreamTag::kOutputNu)};
}

// --- MFL-ABR ---------------------------------------------------------------

AbrState make_abr_state(const MinimaxProblem& problem, const RunConfig& cfg) {
  problem.validate();
  cfg.validate(Algorithm::kAnchoredBestResponse);
  AbrState s;
  auto [x, y] = initial_particles(problem, cfg);
  s.x = std::move(x);
  s.y = std::move(y);
  return s;
}

void mfl_abr_outer_step(AbrState& state, const MinimaxProblem& problem, const RunConfig& cfg,
                        const InnerHook& on_inner) {
  const auto k1 = static_cast<std::uint64_t>(state.outer + 1);
  const auto n = static_cast<std::int64_t>(state.x.size());
  if (state.outer == 0 || !cfg.abr.warm_start) {
    const auto draw = [&](const BaseMeasure& base, StreamTag tag) {
      ParticleSet p(static_cast<std::size_t>(n), base.dim());
      for (std::int64_t i = 0; i < n; ++i) {
        CounterStream stream(cfg.seed, k1, static_cast<std::uint32_t>(i), tag);
        base.sample(stream, p[static_cast<std::size_t>(i)]);
      }
      return p;
    };
    state.x_inner = draw(problem.base_mu, StreamTag::kInnerInitMu);
    state.y_inner = draw(problem.base_nu, StreamTag::kInnerInitNu);
  }

  const ParticleSet& anchor_x = state.x;
  const ParticleSet& anchor_y = state.y;
  FieldBuffer gx = zero_field(state.x_inner);
  FieldBuffer gy = zero_field(state.y_inner);
  state.inner = 0;
  for (int l = 0; l < cfg.abr.inner; ++l) {
    problem.objective->grad_mu(state.x_inner, anchor_x, anchor_y, gx, cfg.threads);
    problem.objective->grad_nu(state.y_inner, anchor_x, anchor_y, gy, cfg.threads);
    const auto epoch = static_cast<std::uint64_t>(++state.inner_total);
    langevin_update(state.x_inner, gx, +1.0, problem.base_mu, cfg, epoch,
                    StreamTag::kInnerNoiseMu);
    langevin_update(state.y_inner, gy, -1.0, problem.base_nu, cfg, epoch,
                    StreamTag::kInnerNoiseNu);
    ++state.inner;
    check_finite(state.x_inner, state.y_inner, state.outer * cfg.abr.inner + state.inner,
                 "MFL-ABR inner loop");
    if (on_inner) {
      on_inner({state.outer, state.inner, anchor_x, anchor_y, state.x_inner, state.y_inner});
    }
  }

  const auto count = static_cast<std::int64_t>(
      std::floor(cfg.abr.mix * static_cast<double>(n) * (1.0 + 1e-12)));
  CounterStream sx(cfg.seed, k1, 0, StreamTag::kReplaceMu);
  CounterStream sy(cfg.seed, k1, 0, StreamTag::kReplaceNu);
  replace_particles(state.x, state.x_inner, std::min(count, n), sx);
  replace_particles(state.y, state.y_inner, std::min(count, n), sy);
  ++state.outer;
}

std::vector<std::pair<ParticleSet, ParticleSet>> mfl_abr_run(const MinimaxProblem& problem,
                                                            const RunConfig& cfg) {
  AbrState state = make_abr_state(problem, cfg);
  std::vector<std::pair<ParticleSet, ParticleSet>> out;
  out.reserve(static_cast<std::size_t>(cfg.abr.outer) + 1);
  out.emplace_back(state.x, state.y);
  for (int k = 0; k < cfg.abr.outer; ++k) {
    mfl_abr_outer_step(state, problem, cfg);
    out.emplace_back(state.x, state.y);
  }
  return out;
}

// --- Driver ----------------------------------------------------------------

std::int64_t total_epochs(Algorithm algorithm, const RunConfig& cfg) {
  if (algorithm == Algorithm::kAnchoredBestResponse) {
    return static_cast<std::int64_t>(cfg.abr.outer) * cfg.abr.inner;
  }
  return cfg.epochs;
}

std::vector<std::int64_t> snapshot_epochs(std::int64_t total, std::int64_t every) {
  require(every >= 1, fmt::format("snapshot cadence must be >= 1, got {}", every));
  std::vector<std::int64_t> out;
  for (std::int64_t e = 0; e <= total; e += every) out.push_back(e);
  if (out.back() != total) out.push_back(total);
  return out;
}

namespace {

struct Recorder {
  Trajectory& out;
  const Hooks& hooks;
  Algorithm algorithm;
  std::int64_t every;
  std::int64_t total;
  bool one_dim;

  bool wants_snapshot(std::int64_t epoch) const { return epoch % every == 0 || epoch == total; }

  void step(std::int64_t epoch, const ParticleSet& px, const ParticleSet& py,
            const ParticleSet& x, const ParticleSet& y) {
    if (one_dim) out.steps.push_back({epoch, w1_empirical_1d(px, x), w1_empirical_1d(py, y)});
  }

  void epoch(std::int64_t e, const ParticleSet& x, const ParticleSet& y, const ParticleSet& xo,
             const ParticleSet& yo, const ParticleSet* x_avg, const ParticleSet* y_avg) {
    if (wants_snapshot(e)) out.snapshots.push_back({e, x, y, xo, yo});
    out.x_out = xo;
    out.y_out = yo;
    out.final_epoch = e;
    if (hooks.on_epoch) hooks.on_epoch({algorithm, e, x, y, x_avg, y_avg});
  }
};

}  // namespace

void run_experiment(Algorithm algorithm, const MinimaxProblem& problem, const RunConfig& cfg,
                    std::int64_t snapshot_every, Trajectory& out, const Hooks& hooks) {
  problem.validate();
  cfg.validate(algorithm);
  require(snapshot_every >= 1, fmt::format("snapshot cadence must be >= 1, got {}", snapshot_every));
  if (algorithm == Algorithm::kAnchoredBestResponse) {
    require(snapshot_every % cfg.abr.inner == 0,
            fmt::format("MFL-ABR snapshot cadence {} must be a multiple of the inner loop length {}",
                        snapshot_every, cfg.abr.inner));
  }
  out = Trajectory{};
  out.algorithm = algorithm;
  out.snapshot_every = snapshot_every;
  const std::int64_t total = total_epochs(algorithm, cfg);
  const bool one_dim = problem.base_mu.dim() == 1 && problem.base_nu.dim() == 1;
  Recorder rec{out, hooks, algorithm, snapshot_every, total, one_dim};

  switch (algorithm) {
    case Algorithm::kDescentAscent: {
      DaState s = make_da_state(problem, cfg);
      rec.epoch(0, s.x, s.y, s.x, s.y, nullptr, nullptr);
      for (std::int64_t e = 0; e < total; ++e) {
        ParticleSet px = s.x, py = s.y;
        mfl_da_step(s, problem, cfg);
        rec.step(s.epoch, px, py, s.x, s.y);
        rec.epoch(s.epoch, s.x, s.y, s.x, s.y, nullptr, nullptr);
      }
      break;
    }
    case Algorithm::kAveragedGradient: {
      AgState s = make_ag_state(problem, cfg);
      const bool rolling = s.mode == AgMode::kRolling;
      const auto emit = [&](AgState& st) {
        const std::int64_t e = st.epoch();
        if (rolling) {
          rec.epoch(e, st.x, st.y, st.x_bar, st.y_bar, &st.x_bar, &st.y_bar);
        } else if (rec.wants_snapshot(e)) {
          auto [xo, yo] = ag_output(st, cfg);
          rec.epoch(e, st.x, st.y, xo, yo, nullptr, nullptr);
        } else {
          rec.epoch(e, st.x, st.y, st.x, st.y, nullptr, nullptr);
        }
      };
      emit(s);
      for (std::int64_t e = 0; e < total; ++e) {
        ParticleSet px = s.x, py = s.y;
        mfl_ag_step(s, problem, cfg);
        rec.step(s.epoch(), px, py, s.x, s.y);
        emit(s);
      }
      out.zero_replacement_steps = s.zero_replacement_steps;
      if (s.zero_replacement_steps > 0) {
        info(fmt::format("MFL-AG: {} of {} reservoir refreshes replaced no particle",
                         s.zero_replacement_steps, total));
      }
      break;
    }
    case Algorithm::kAnchoredBestResponse: {
      AbrState s = make_abr_state(problem, cfg);
      rec.epoch(0, s.x, s.y, s.x, s.y, nullptr, nullptr);
      for (int k = 0; k < cfg.abr.outer; ++k) {
        ParticleSet px = s.x, py = s.y;
        mfl_abr_outer_step(s, problem, cfg, hooks.on_inner);
        const std::int64_t e = s.outer * cfg.abr.inner;
        rec.step(e, px, py, s.x, s.y);
        rec.epoch(e, s.x, s.y, s.x, s.y, nullptr, nullptr);
      }
      break;
    }
  }
}

Trajectory run_experiment(Algorithm algorithm, const MinimaxProblem& problem,
                          const RunConfig& cfg, std::int64_t snapshot_every, const Hooks& hooks) {
  Trajectory out;
  run_experiment(algorithm, problem, cfg, snapshot_every, out, hooks);
  return out;
}

}  // namespace mfl
