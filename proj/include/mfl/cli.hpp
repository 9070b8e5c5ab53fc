#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfl/dynamics.hpp"
#include "mfl/markov.hpp"
#include "mfl/metrics.hpp"
#include "mfl/run_config.hpp"

namespace mfl::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "MFL_OUT_DIR";

// Raised for anything wrong with flags or configuration; maps to exit 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PayoffSpec {
  std::string name = "sigmoid";  // sigmoid | quadratic | separable
  // separable: g(x) = slope_g x + wave_g sin x, h(y) = slope_h y + wave_h sin y
  double slope_g = 1.0, wave_g = 0.0, slope_h = 1.0, wave_h = 0.0;
};

enum class NiMode { kAuto, kThreePoint, kQuadrature, kNone };

struct MarkovSpec {
  std::vector<std::string> states;
  double discount = 0.9;
  int rounds = 10;
  Algorithm solver = Algorithm::kAveragedGradient;
  double ni_tolerance = 0.05;
  std::string reward = "quadratic";  // constant | quadratic
  // Per-state parameters; constant uses reward_d only.
  std::vector<double> reward_a, reward_b, reward_c, reward_d;
  std::string transition = "constant";  // constant | logistic
  std::vector<std::vector<double>> transition_matrix;
  std::vector<double> transition_a, transition_b, transition_c;
  BellmanNoise noise;
  std::vector<double> initial_values;
  int state_threads = 1;
};

struct ExperimentConfig {
  std::string preset = "custom";
  std::vector<Algorithm> algorithms{Algorithm::kAveragedGradient};
  PayoffSpec payoff;
  std::string base = "standard-gaussian";
  RunConfig run;
  double shift_mu = 0.0;  // initial particles are rho shifted by these
  double shift_nu = 0.0;
  std::int64_t snapshot_every = 100;
  NiMode ni = NiMode::kAuto;
  GridConfig grid;
  std::string out_dir = "mfl-out";
  std::optional<MarkovSpec> markov;

  // Throws ConfigError.
  void validate() const;
};

ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// INI text with sections [experiment], [payoff], [base], [run], [abr],
// [init], [metrics], [markov]. Unknown sections or keys are errors.
ExperimentConfig parse_ini(const std::string& text);
// Canonical INI listing every field; parse_ini(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig& config);

// Reads an INI file or a meta.json manifest written by a previous run.
ExperimentConfig load_config(const std::string& path);

MinimaxProblem build_problem(const ExperimentConfig& config);
std::shared_ptr<MarkovGame> build_game(const ExperimentConfig& config);
// cfg.run with the initial shifts applied.
RunConfig build_run(const ExperimentConfig& config, const MinimaxProblem& problem);

// 17 significant digits, round-trip exact.
std::string format_double(double v);

// Parses argv-style arguments (without the program name) and runs.
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfl::cli
