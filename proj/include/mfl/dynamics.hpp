#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mfl/base_measure.hpp"
#include "mfl/objective.hpp"
#include "mfl/particles.hpp"
#include "mfl/run_config.hpp"
#include "mfl/weighting.hpp"

namespace mfl {

// An objective together with the two reference measures.
struct MinimaxProblem {
  std::shared_ptr<const Objective> objective;
  BaseMeasure base_mu = BaseMeasure::standard_gaussian();
  BaseMeasure base_nu = BaseMeasure::standard_gaussian();

  static MinimaxProblem bilinear(PayoffPtr payoff,
                                 BaseMeasure base_mu = BaseMeasure::standard_gaussian(),
                                 BaseMeasure base_nu = BaseMeasure::standard_gaussian());

  // The kernel of a bilinear objective, or null.
  const Payoff* payoff() const { return objective ? objective->bilinear_kernel() : nullptr; }
  void validate() const;
};

// X_0, Y_0: cfg.init_mu / cfg.init_nu when present, otherwise sampled from
// the bases with the kInitMu / kInitNu streams of cfg.seed.
std::pair<ParticleSet, ParticleSet> initial_particles(const MinimaxProblem& problem,
                                                      const RunConfig& cfg);

// One Euler-Maruyama step for each particle of `p`:
//   p^i <- p^i - eta (sign drift^i + lambda grad U(p^i)) + sqrt(2 lambda eta) xi^i,
// with xi^i drawn from the stream (cfg.seed, epoch, i, tag).
void langevin_update(ParticleSet& p, const FieldBuffer& drift, double sign,
                     const BaseMeasure& base, const RunConfig& cfg, std::uint64_t epoch,
                     StreamTag tag);

// Overwrites `count` distinct uniformly chosen rows of `target` with
// distinct uniformly chosen rows of `donors`.
void replace_particles(ParticleSet& target, const ParticleSet& donors, std::int64_t count,
                       CounterStream& stream);

// --- MFL-DA ----------------------------------------------------------------

struct DaState {
  ParticleSet x, y;
  std::int64_t epoch = 0;  // updates applied so far
};

DaState make_da_state(const MinimaxProblem& problem, const RunConfig& cfg);
// Simultaneous update of both players from the pre-step sets.
void mfl_da_step(DaState& state, const MinimaxProblem& problem, const RunConfig& cfg);

// --- MFL-AG ----------------------------------------------------------------

struct AgState {
  ParticleSet x, y;        // X_k, Y_k
  std::int64_t k = 1;      // index of the current iterate
  CumulativeWeight weights{WeightingScheme{}};  // beta_k, B_k
  AgMode mode = AgMode::kRolling;
  // Rolling mode: reservoirs approximating the B_k-weighted mixtures.
  ParticleSet x_bar, y_bar;
  // History mode: X_1..X_k and Y_1..Y_k.
  std::vector<ParticleSet> history_x, history_y;
  std::vector<double> history_weights;  // beta_1..beta_k
  std::int64_t last_replacements = 0;
  std::int64_t zero_replacement_steps = 0;

  std::int64_t epoch() const { return k - 1; }
};

AgState make_ag_state(const MinimaxProblem& problem, const RunConfig& cfg);

struct DriftPair {
  FieldBuffer mu, nu;  // drift at X_k and at Y_k, without the lambda grad U term
};

// History mode: sum_j (beta_j / B_k) grad dL/dmu(mu_{X_j}, nu_{Y_j}) at X_k.
// Rolling mode: grad dL/dmu(mu_{X_bar}, nu_{Y_bar}) at X_k; the reservoirs
// may have any size here, which lets tests pass exact weighted concatenations.
DriftPair ag_drift(const AgState& state, const MinimaxProblem& problem, int threads);

// X_k -> X_{k+1}, then refreshes the reservoirs (rolling) or appends the new
// snapshot (history). Noise uses stream epoch k; reservoir refresh uses
// (seed, k + 1, 0, kReplaceMu / kReplaceNu).
void mfl_ag_step(AgState& state, const MinimaxProblem& problem, const RunConfig& cfg);

// floor(beta_j N / B_K) for j = 1..K.
std::vector<std::int64_t> ag_output_counts(const WeightingScheme& scheme, std::int64_t K,
                                           std::int64_t n);

// Averaged output. Rolling mode returns the reservoirs. History mode
// concatenates ag_output_counts draws without replacement from each
// snapshot, snapshot j using the stream (seed, K, j, kOutputMu / kOutputNu).
// Throws std::invalid_argument when every count is zero.
std::pair<ParticleSet, ParticleSet> ag_output(const AgState& state, const RunConfig& cfg);

// --- MFL-ABR ---------------------------------------------------------------

struct AbrState {
  ParticleSet x, y;              // outer mu_k, nu_k
  ParticleSet x_inner, y_inner;  // X^dagger, Y^dagger
  std::int64_t outer = 0;        // completed outer iterations
  std::int64_t inner = 0;        // inner steps taken in the current outer iteration
  std::int64_t inner_total = 0;  // inner steps taken overall; the inner noise epoch
};

struct InnerView {
  std::int64_t outer, inner;
  const ParticleSet& anchor_x;
  const ParticleSet& anchor_y;
  const ParticleSet& inner_x;
  const ParticleSet& inner_y;
};
using InnerHook = std::function<void(const InnerView&)>;

AbrState make_abr_state(const MinimaxProblem& problem, const RunConfig& cfg);

// One outer iteration: (re)initializes the inner sets from the bases unless
// warm-starting after the first iteration (stream (seed, k + 1, i,
// kInnerInit*)), runs cfg.abr.inner anchored steps against the frozen
// outer sets, then replaces floor(mix N) outer particles with inner ones.
void mfl_abr_outer_step(AbrState& state, const MinimaxProblem& problem, const RunConfig& cfg,
                        const InnerHook& on_inner = {});

// Runs cfg.abr.outer outer iterations and returns the outer iterates
// (mu_0, nu_0), ..., (mu_K, nu_K).
std::vector<std::pair<ParticleSet, ParticleSet>> mfl_abr_run(const MinimaxProblem& problem,
                                                            const RunConfig& cfg);

// --- Driver ----------------------------------------------------------------

struct EpochView {
  Algorithm algorithm;
  std::int64_t epoch;
  const ParticleSet& x;
  const ParticleSet& y;
  // MFL-AG rolling reservoirs; null otherwise.
  const ParticleSet* x_average = nullptr;
  const ParticleSet* y_average = nullptr;
};
using EpochHook = std::function<void(const EpochView&)>;

struct Hooks {
  EpochHook on_epoch;  // after initialization and after every epoch
  InnerHook on_inner;  // MFL-ABR only, after every inner step
};

struct Snapshot {
  std::int64_t epoch;
  ParticleSet x, y;          // iterates
  ParticleSet x_out, y_out;  // averaged output (MFL-AG) or the iterate
};

struct StepDistance {
  std::int64_t epoch;  // distance between the iterates at epoch - stride and epoch
  double w1_mu, w1_nu;
};

struct Trajectory {
  Algorithm algorithm = Algorithm::kDescentAscent;
  std::int64_t snapshot_every = 1;
  std::vector<Snapshot> snapshots;
  std::vector<StepDistance> steps;
  ParticleSet x_out, y_out;  // final output
  std::int64_t final_epoch = 0;
  std::int64_t zero_replacement_steps = 0;
};

// Epochs are updates: cfg.epochs for MFL-DA and MFL-AG, outer * inner for
// MFL-ABR, whose epoch counter advances by cfg.abr.inner per outer iteration.
std::int64_t total_epochs(Algorithm algorithm, const RunConfig& cfg);

// Snapshot epochs: 0, s, 2s, ... and always the final epoch. For MFL-ABR the
// cadence must be a multiple of cfg.abr.inner. Step distances are recorded
// every epoch (every outer iteration for MFL-ABR) and need d = 1.
//
// On a non-finite particle the trajectory holds everything up to the last
// finite epoch and NumericalFailure is thrown.
void run_experiment(Algorithm algorithm, const MinimaxProblem& problem, const RunConfig& cfg,
                    std::int64_t snapshot_every, Trajectory& out, const Hooks& hooks = {});
Trajectory run_experiment(Algorithm algorithm, const MinimaxProblem& problem,
                          const RunConfig& cfg, std::int64_t snapshot_every,
                          const Hooks& hooks = {});

std::vector<std::int64_t> snapshot_epochs(std::int64_t total, std::int64_t every);

}  // namespace mfl
