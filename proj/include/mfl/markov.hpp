#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfl/base_measure.hpp"
#include "mfl/metrics.hpp"
#include "mfl/payoff.hpp"
#include "mfl/run_config.hpp"

namespace mfl {

// r(s, x, y) with its action gradients. Actions are one-dimensional.
struct RewardModel {
  std::function<double(std::size_t s, double x, double y)> value;
  std::function<double(std::size_t s, double x, double y)> grad_x;
  std::function<double(std::size_t s, double x, double y)> grad_y;

  static RewardModel constant(std::vector<double> c);
  // r(s, x, y) = a_s x y + b_s x + c_s y + d_s
  struct Quadratic {
    double a = 1.0, b = 0.0, c = 0.0, d = 0.0;
  };
  static RewardModel quadratic(std::vector<Quadratic> per_state);
};

// P(. | s, x, y) over the states and the action gradients of
// sum_s' P(s' | s, x, y) v(s').
struct TransitionModel {
  std::function<void(std::size_t s, double x, double y, std::span<double> probs)> probabilities;
  std::function<double(std::size_t s, double x, double y, std::span<const double> v)>
      grad_x_expectation;
  std::function<double(std::size_t s, double x, double y, std::span<const double> v)>
      grad_y_expectation;

  // Row-stochastic matrix independent of the actions.
  static TransitionModel constant(std::vector<std::vector<double>> matrix);
  // Stay in s with probability sigmoid(a_s x + b_s y + c_s); otherwise move
  // uniformly to one of the other states.
  struct Logistic {
    double a = 0.0, b = 0.0, c = 0.0;
  };
  static TransitionModel logistic(std::vector<Logistic> per_state);
};

struct MarkovGame {
  std::vector<std::string> states;
  RewardModel reward;
  TransitionModel transition;
  double discount = 0.9;  // gamma
  double temperature = 0.0;
  BaseMeasure base_mu = BaseMeasure::standard_gaussian();
  BaseMeasure base_nu = BaseMeasure::standard_gaussian();

  std::size_t size() const { return states.size(); }
  // Checks gamma in [0, 1), distinct state names, 1-D bases, and that the
  // transition rows sum to one at a few probe actions.
  void validate() const;
};

// Offsets added to Q^(k+1) to stress the epsilon_Q term of the bound.
struct BellmanNoise {
  enum class Mode { kNone, kWorstCase, kUniform };
  Mode mode = Mode::kNone;
  double epsilon = 0.0;
};

struct SchemeConfig {
  Algorithm solver = Algorithm::kAveragedGradient;  // MFL-AG or MFL-ABR
  RunConfig run;
  double ni_tolerance = 0.05;  // epsilon_L
  int rounds = 10;             // K_vi
  BellmanNoise noise;
  GridConfig grid;
  int state_threads = 1;  // Step 1 solves states in parallel

  void validate() const;
};

// Q^(k)(x, y | s) = r(s, x, y) + gamma sum_s' P(s' | s, x, y) V(s') + offset_s.
// The expectation runs over states in name order.
class BellmanPayoff final : public Payoff {
 public:
  BellmanPayoff(std::shared_ptr<const MarkovGame> game, std::size_t state,
                std::vector<double> values, double offset = 0.0);

  std::string name() const override;
  std::size_t dim_x() const override { return 1; }
  std::size_t dim_y() const override { return 1; }
  double value(Point x, Point y) const override;
  void grad_x(Point x, Point y, MutablePoint out) const override;
  void grad_y(Point x, Point y, MutablePoint out) const override;

 private:
  double expectation(double x, double y) const;

  std::shared_ptr<const MarkovGame> game_;
  std::size_t state_;
  std::vector<double> values_;
  std::vector<std::size_t> order_;
  double offset_;
};

struct StatePolicy {
  ParticleSet x, y;
  double ni = 0.0;             // ni_quadrature on Q^(k)(s)
  bool above_tolerance = false;  // ni > epsilon_L
  std::string failure;         // non-empty when the inner solver diverged
};

struct ValueIterate {
  std::int64_t round = 0;
  std::vector<double> values;      // V^(k)(s)
  std::vector<double> offsets;     // injected Bellman offsets used to build Q^(k)
  std::vector<StatePolicy> policies;  // filled by step 1 of round k

  std::shared_ptr<const Payoff> q(const std::shared_ptr<const MarkovGame>& game,
                                  std::size_t s) const;
};

ValueIterate initial_iterate(const MarkovGame& game, std::optional<std::vector<double>> v0 = {});

// Step 1: solves every state's minimax problem on Q^(k)(s). The state with
// name n uses the seed derive_seed(seed, stable_hash(n)).
std::vector<StatePolicy> step1_minimax(const std::shared_ptr<const MarkovGame>& game,
                                       const ValueIterate& iterate, const SchemeConfig& cfg,
                                       std::uint64_t seed);

// Step 2: V^(k+1)(s) = L_lambda(mu(s), nu(s); Q^(k)(s)). Throws
// NumericalFailure naming the state when a value is not finite.
ValueIterate step2_value_update(const std::shared_ptr<const MarkovGame>& game,
                                const ValueIterate& iterate,
                                const std::vector<StatePolicy>& policies, const SchemeConfig& cfg,
                                std::uint64_t seed);

struct SchemeResult {
  std::vector<ValueIterate> iterates;  // V^(0), ..., V^(K_vi)
  std::vector<double> gaps;            // ||V^(k) - V^(k-1)||_inf for k = 1..K_vi
  std::vector<double> max_ni;          // max_s NI at round k - 1
};

SchemeResult run_scheme(const std::shared_ptr<const MarkovGame>& game, const SchemeConfig& cfg,
                        std::uint64_t seed, std::optional<std::vector<double>> v0 = {});

double sup_distance(std::span<const double> a, std::span<const double> b);

}  // namespace mfl
