#include "mfl/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/core.h>

#include "mfl/dynamics.hpp"
#include "mfl/errors.hpp"
#include "mfl/objective.hpp"
#include "mfl/parallel.hpp"

namespace mfl {
namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

RewardModel RewardModel::constant(std::vector<double> c) {
  auto table = std::make_shared<const std::vector<double>>(std::move(c));
  return {[table](std::size_t s, double, double) { return table->at(s); },
          [](std::size_t, double, double) { return 0.0; },
          [](std::size_t, double, double) { return 0.0; }};
}

RewardModel RewardModel::quadratic(std::vector<Quadratic> per_state) {
  auto table = std::make_shared<const std::vector<Quadratic>>(std::move(per_state));
  return {[table](std::size_t s, double x, double y) {
            const auto& q = table->at(s);
            return q.a * x * y + q.b * x + q.c * y + q.d;
          },
          [table](std::size_t s, double, double y) {
            const auto& q = table->at(s);
            return q.a * y + q.b;
          },
          [table](std::size_t s, double x, double) {
            const auto& q = table->at(s);
            return q.a * x + q.c;
          }};
}

TransitionModel TransitionModel::constant(std::vector<std::vector<double>> matrix) {
  const std::size_t n = matrix.size();
  for (const auto& row : matrix) {
    require(row.size() == n, "transition matrix must be square");
  }
  auto table = std::make_shared<const std::vector<std::vector<double>>>(std::move(matrix));
  return {[table](std::size_t s, double, double, std::span<double> probs) {
            const auto& row = table->at(s);
            std::copy(row.begin(), row.end(), probs.begin());
          },
          [](std::size_t, double, double, std::span<const double>) { return 0.0; },
          [](std::size_t, double, double, std::span<const double>) { return 0.0; }};
}

TransitionModel TransitionModel::logistic(std::vector<Logistic> per_state) {
  const std::size_t n = per_state.size();
  require(n >= 2, "logistic transitions need at least two states");
  auto table = std::make_shared<const std::vector<Logistic>>(std::move(per_state));
  // d/dt of p v_s + (1 - p) mean_{s' != s} v_s' with p = sigmoid(t)
  const auto slope = [table, n](std::size_t s, double x, double y, std::span<const double> v) {
    const auto& l = table->at(s);
    const double p = sigmoid(l.a * x + l.b * y + l.c);
    double others = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != s) others += v[j];
    }
    others /= static_cast<double>(n - 1);
    return p * (1.0 - p) * (v[s] - others);
  };
  return {[table, n](std::size_t s, double x, double y, std::span<double> probs) {
            const auto& l = table->at(s);
            const double p = sigmoid(l.a * x + l.b * y + l.c);
            const double move = (1.0 - p) / static_cast<double>(n - 1);
            for (std::size_t j = 0; j < n; ++j) probs[j] = j == s ? p : move;
          },
          [table, slope](std::size_t s, double x, double y, std::span<const double> v) {
            return table->at(s).a * slope(s, x, y, v);
          },
          [table, slope](std::size_t s, double x, double y, std::span<const double> v) {
            return table->at(s).b * slope(s, x, y, v);
          }};
}

void MarkovGame::validate() const {
  require(!states.empty(), "Markov game needs at least one state");
  require(std::set<std::string>(states.begin(), states.end()).size() == states.size(),
          "Markov game state names must be distinct");
  require(discount >= 0.0 && discount < 1.0,
          fmt::format("discount must lie in [0, 1), got {}", discount));
  require(temperature >= 0.0, "temperature must be >= 0");
  require(reward.value && reward.grad_x && reward.grad_y, "Markov game needs a reward model");
  require(transition.probabilities && transition.grad_x_expectation &&
              transition.grad_y_expectation,
          "Markov game needs a transition model");
  require(base_mu.dim() == 1 && base_nu.dim() == 1, "Markov game actions are one-dimensional");
  std::vector<double> probs(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (const double x : {-1.0, 0.0, 1.0}) {
      for (const double y : {-1.0, 0.0, 1.0}) {
        transition.probabilities(s, x, y, probs);
        double total = 0.0;
        for (const double p : probs) {
          require(p >= 0.0, fmt::format("negative transition probability from state '{}'",
                                        states[s]));
          total += p;
        }
        require(std::abs(total - 1.0) <= 1e-10,
                fmt::format("transition probabilities from state '{}' sum to {}", states[s],
                            total));
      }
    }
  }
}

void SchemeConfig::validate() const {
  require(solver != Algorithm::kDescentAscent,
          "the Markov scheme runs MFL-AG or MFL-ABR as its inner solver");
  require(ni_tolerance >= 0.0, "NI tolerance must be >= 0");
  require(rounds >= 1, fmt::format("value-iteration rounds must be >= 1, got {}", rounds));
  require(noise.epsilon >= 0.0, "Bellman noise level must be >= 0");
  require(state_threads >= 0, "state threads must be >= 0");
  run.validate(solver);
}

// --- BellmanPayoff ---------------------------------------------------------

BellmanPayoff::BellmanPayoff(std::shared_ptr<const MarkovGame> game, std::size_t state,
                             std::vector<double> values, double offset)
    : game_(std::move(game)), state_(state), values_(std::move(values)), offset_(offset) {
  require(game_ != nullptr && state_ < game_->size() && values_.size() == game_->size(),
          "Bellman payoff needs a game, a valid state and one value per state");
  order_.resize(values_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return game_->states[a] < game_->states[b];
  });
}

std::string BellmanPayoff::name() const { return "bellman:" + game_->states[state_]; }

double BellmanPayoff::expectation(double x, double y) const {
  thread_local std::vector<double> probs;
  probs.resize(values_.size());
  game_->transition.probabilities(state_, x, y, probs);
  double e = 0.0;
  for (const std::size_t j : order_) e += probs[j] * values_[j];
  return e;
}

double BellmanPayoff::value(Point x, Point y) const {
  return game_->reward.value(state_, x[0], y[0]) + game_->discount * expectation(x[0], y[0]) +
         offset_;
}

void BellmanPayoff::grad_x(Point x, Point y, MutablePoint out) const {
  out[0] = game_->reward.grad_x(state_, x[0], y[0]) +
           game_->discount * game_->transition.grad_x_expectation(state_, x[0], y[0], values_);
}

void BellmanPayoff::grad_y(Point x, Point y, MutablePoint out) const {
  out[0] = game_->reward.grad_y(state_, x[0], y[0]) +
           game_->discount * game_->transition.grad_y_expectation(state_, x[0], y[0], values_);
}

std::shared_ptr<const Payoff> ValueIterate::q(const std::shared_ptr<const MarkovGame>& game,
                                              std::size_t s) const {
  const double offset = offsets.empty() ? 0.0 : offsets.at(s);
  return std::make_shared<BellmanPayoff>(game, s, values, offset);
}

ValueIterate initial_iterate(const MarkovGame& game, std::optional<std::vector<double>> v0) {
  ValueIterate it;
  it.values = v0 ? std::move(*v0) : std::vector<double>(game.size(), 0.0);
  require(it.values.size() == game.size(), "initial values need one entry per state");
  it.offsets.assign(game.size(), 0.0);
  return it;
}

// --- Scheme ----------------------------------------------------------------

std::vector<StatePolicy> step1_minimax(const std::shared_ptr<const MarkovGame>& game,
                                       const ValueIterate& iterate, const SchemeConfig& cfg,
                                       std::uint64_t seed) {
  const std::size_t n_states = game->size();
  std::vector<StatePolicy> out(n_states);
  const int workers = std::min<int>(resolve_threads(cfg.state_threads),
                                    static_cast<int>(n_states));
  parallel_for(n_states, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto q = iterate.q(game, s);
      const MinimaxProblem problem = MinimaxProblem::bilinear(q, game->base_mu, game->base_nu);
      RunConfig run = cfg.run;
      run.temperature = game->temperature;
      run.seed = derive_seed(seed, stable_hash(game->states[s]));
      if (workers > 1) run.threads = 1;
      StatePolicy& policy = out[s];
      try {
        if (cfg.solver == Algorithm::kAveragedGradient) {
          AgState st = make_ag_state(problem, run);
          for (int k = 0; k < run.epochs; ++k) mfl_ag_step(st, problem, run);
          auto [x, y] = ag_output(st, run);
          policy.x = std::move(x);
          policy.y = std::move(y);
        } else {
          AbrState st = make_abr_state(problem, run);
          for (int k = 0; k < run.abr.outer; ++k) mfl_abr_outer_step(st, problem, run);
          policy.x = std::move(st.x);
          policy.y = std::move(st.y);
        }
        policy.ni = ni_quadrature(*q, policy.x, policy.y, game->temperature, game->base_mu,
                                  game->base_nu, cfg.grid)
                        .value;
        policy.above_tolerance = policy.ni > cfg.ni_tolerance;
      } catch (const NumericalFailure& e) {
        policy.failure = fmt::format("state '{}': {}", game->states[s], e.what());
      }
    }
  });
  return out;
}

ValueIterate step2_value_update(const std::shared_ptr<const MarkovGame>& game,
                                const ValueIterate& iterate,
                                const std::vector<StatePolicy>& policies, const SchemeConfig& cfg,
                                std::uint64_t seed) {
  require(policies.size() == game->size(), "step 2 needs a policy for every state");
  ValueIterate next;
  next.round = iterate.round + 1;
  next.values.resize(game->size());
  next.offsets.assign(game->size(), 0.0);
  for (std::size_t s = 0; s < game->size(); ++s) {
    const auto& p = policies[s];
    if (!p.failure.empty()) throw NumericalFailure(p.failure, iterate.round);
    const auto q = iterate.q(game, s);
    const double v = regularized_value(*q, p.x, p.y, game->temperature, game->base_mu,
                                       game->base_nu, cfg.run.threads);
    if (!std::isfinite(v)) {
      throw NumericalFailure(fmt::format("value of state '{}' is not finite at round {}",
                                         game->states[s], next.round),
                             next.round);
    }
    next.values[s] = v;
    switch (cfg.noise.mode) {
      case BellmanNoise::Mode::kNone:
        break;
      case BellmanNoise::Mode::kWorstCase:
        next.offsets[s] = cfg.noise.epsilon;
        break;
      case BellmanNoise::Mode::kUniform: {
        CounterStream stream(derive_seed(seed, stable_hash(game->states[s])),
                             static_cast<std::uint64_t>(next.round), 0, StreamTag::kPerturbation);
        next.offsets[s] = cfg.noise.epsilon * (2.0 * stream.uniform() - 1.0);
        break;
      }
    }
  }
  return next;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "sup distance needs equal lengths");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

SchemeResult run_scheme(const std::shared_ptr<const MarkovGame>& game, const SchemeConfig& cfg,
                        std::uint64_t seed, std::optional<std::vector<double>> v0) {
  require(game != nullptr, "run_scheme needs a game");
  game->validate();
  cfg.validate();
  SchemeResult result;
  result.iterates.push_back(initial_iterate(*game, std::move(v0)));
  for (int k = 0; k < cfg.rounds; ++k) {
    auto& current = result.iterates.back();
    current.policies = step1_minimax(game, current, cfg, seed);
    double worst = 0.0;
    for (const auto& p : current.policies) worst = std::max(worst, p.ni);
    result.max_ni.push_back(worst);
    ValueIterate next = step2_value_update(game, current, current.policies, cfg, seed);
    result.gaps.push_back(sup_distance(next.values, result.iterates.back().values));
    result.iterates.push_back(std::move(next));
  }
  return result;
}

}  // namespace mfl
