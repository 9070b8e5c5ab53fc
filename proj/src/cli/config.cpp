#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "mfl/cli.hpp"
#include "mfl/errors.hpp"

namespace mfl::cli {
namespace {

using boost::property_tree::ptree;

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

// Typed access to one INI section; every key read is marked so leftovers
// can be reported.
class Section {
 public:
  Section(std::string name, const ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  void read(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }

  void read(const std::string& key, double& out) {
    if (auto v = raw(key)) out = to_double(key, *v);
  }

  void read(const std::string& key, int& out) {
    if (auto v = raw(key)) {
      const auto x = to_int(key, *v);
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        fail(key, *v, "an integer in range");
      }
      out = static_cast<int>(x);
    }
  }

  void read(const std::string& key, std::int64_t& out) {
    if (auto v = raw(key)) out = to_int(key, *v);
  }

  void read(const std::string& key, std::size_t& out) {
    if (auto v = raw(key)) {
      const auto x = to_int(key, *v);
      if (x < 0) fail(key, *v, "a non-negative integer");
      out = static_cast<std::size_t>(x);
    }
  }

  void read_u64(const std::string& key, std::uint64_t& out) {
    if (auto v = raw(key)) {
      try {
        std::size_t pos = 0;
        if (!v->empty() && (*v)[0] == '-') throw std::invalid_argument("negative");
        out = std::stoull(*v, &pos, 0);
        if (pos != v->size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail(key, *v, "an unsigned 64-bit integer");
      }
    }
  }

  void read(const std::string& key, bool& out) {
    if (auto v = raw(key)) {
      const auto s = lower(*v);
      if (s == "true" || s == "yes" || s == "on" || s == "1") {
        out = true;
      } else if (s == "false" || s == "no" || s == "off" || s == "0") {
        out = false;
      } else {
        fail(key, *v, "a boolean");
      }
    }
  }

  void read(const std::string& key, std::vector<double>& out) {
    if (auto v = raw(key)) {
      out.clear();
      for (const auto& item : split(*v, ',')) out.push_back(to_double(key, item));
    }
  }

  void read(const std::string& key, std::vector<std::string>& out) {
    if (auto v = raw(key)) out = split(*v, ',');
  }

  void read_matrix(const std::string& key, std::vector<std::vector<double>>& out) {
    if (auto v = raw(key)) {
      out.clear();
      for (const auto& row : split(*v, ';')) {
        std::vector<double> r;
        for (const auto& item : split(row, ',')) r.push_back(to_double(key, item));
        out.push_back(std::move(r));
      }
    }
  }

  void check_unused() const {
    if (!tree_) return;
    for (const auto& [key, value] : *tree_) {
      if (!used_.count(key)) {
        throw ConfigError(fmt::format("unknown key '{}' in section [{}]", key, name_));
      }
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& value,
                         const char* expected) const {
    throw ConfigError(
        fmt::format("[{}] {} = '{}' is not {}", name_, key, value, expected));
  }

 private:
  double to_double(const std::string& key, const std::string& v) const {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument("bad");
      return x;
    } catch (const std::exception&) {
      fail(key, v, "a finite number");
    }
  }

  std::int64_t to_int(const std::string& key, const std::string& v) const {
    try {
      std::size_t pos = 0;
      const long long x = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("bad");
      return x;
    } catch (const std::exception&) {
      fail(key, v, "an integer");
    }
  }

  std::string name_;
  const ptree* tree_;
  std::set<std::string> used_;
};

const char* ni_tag(NiMode m) {
  switch (m) {
    case NiMode::kAuto:
      return "auto";
    case NiMode::kThreePoint:
      return "three-point";
    case NiMode::kQuadrature:
      return "quadrature";
    case NiMode::kNone:
      return "none";
  }
  return "auto";
}

NiMode parse_ni(const std::string& s) {
  const auto t = lower(s);
  if (t == "auto") return NiMode::kAuto;
  if (t == "three-point") return NiMode::kThreePoint;
  if (t == "quadrature") return NiMode::kQuadrature;
  if (t == "none") return NiMode::kNone;
  throw ConfigError(fmt::format("unknown NI mode '{}' (auto, three-point, quadrature, none)", s));
}

Algorithm parse_algorithm_tag(const std::string& s) {
  try {
    return parse_algorithm(lower(s));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

const char* ag_mode_tag(AgMode m) { return m == AgMode::kRolling ? "rolling" : "history"; }

const char* noise_tag(BellmanNoise::Mode m) {
  switch (m) {
    case BellmanNoise::Mode::kNone:
      return "none";
    case BellmanNoise::Mode::kWorstCase:
      return "worst-case";
    case BellmanNoise::Mode::kUniform:
      return "uniform";
  }
  return "none";
}

std::string list(const std::vector<double>& v) {
  std::vector<std::string> items;
  for (const double x : v) items.push_back(fmt::format("{}", x));
  return join(items);
}

std::string matrix(const std::vector<std::vector<double>>& m) {
  std::vector<std::string> rows;
  for (const auto& r : m) rows.push_back(list(r));
  return join(rows, "; ");
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

// --- Presets ---------------------------------------------------------------

std::vector<std::string> preset_names() {
  return {"figure1", "quadratic-oracle", "separable-oracle", "markov-demo"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "figure1") {
    c.algorithms = {Algorithm::kAveragedGradient, Algorithm::kAnchoredBestResponse,
                    Algorithm::kDescentAscent};
    c.payoff.name = "sigmoid";
    c.run.temperature = 0.01;
    c.run.step = 0.3;
    c.run.particles = 1000;
    c.run.epochs = 1000;
    c.run.weight_exponent = 1.0;
    c.run.abr = {50, 20, 0.15, true};
    c.snapshot_every = 100;
    c.ni = NiMode::kThreePoint;
  } else if (name == "quadratic-oracle") {
    c.algorithms = {Algorithm::kAveragedGradient, Algorithm::kAnchoredBestResponse};
    c.payoff.name = "quadratic";
    c.run.temperature = 0.5;
    c.run.step = 0.05;
    c.run.particles = 2000;
    c.run.epochs = 2000;
    c.run.abr = {50, 20, 0.15, true};
    c.snapshot_every = 500;
    c.ni = NiMode::kQuadrature;
  } else if (name == "separable-oracle") {
    c.algorithms = {Algorithm::kAnchoredBestResponse};
    c.payoff = {"separable", 3.0, 0.5, 2.0, 0.5};
    c.run.temperature = 1.0;
    c.run.step = 0.05;
    c.run.particles = 2000;
    c.run.abr = {30, 50, 0.15, true};
    c.snapshot_every = 250;
    c.ni = NiMode::kQuadrature;
    c.grid.half_width = 12.0;
  } else if (name == "markov-demo") {
    c.algorithms = {};
    c.run.temperature = 0.5;
    c.run.step = 0.05;
    c.run.particles = 300;
    c.run.epochs = 300;
    c.grid.nodes = 1024;
    MarkovSpec m;
    m.states = {"calm", "storm"};
    m.discount = 0.5;
    m.rounds = 5;
    m.reward = "quadratic";
    m.reward_a = {1.0, 0.5};
    m.reward_b = {0.2, -0.3};
    m.reward_c = {-0.1, 0.4};
    m.reward_d = {0.0, 1.0};
    m.transition = "logistic";
    m.transition_a = {0.3, -0.2};
    m.transition_b = {-0.1, 0.2};
    m.transition_c = {1.0, 0.0};
    c.markov = m;
  } else {
    throw ConfigError(fmt::format("unknown preset '{}' (available: {})", name,
                                  join(preset_names())));
  }
  return c;
}

// --- INI -------------------------------------------------------------------

ExperimentConfig parse_ini(const std::string& text) {
  ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("malformed configuration: {} (line {})", e.message(), e.line()));
  }
  static const std::set<std::string> known{"experiment", "payoff", "base", "run", "abr",
                                           "init",       "metrics", "markov"};
  for (const auto& [name, child] : tree) {
    if (!known.count(name)) {
      throw ConfigError(fmt::format("unknown section [{}]", name));
    }
    if (child.empty() && !child.data().empty()) {
      throw ConfigError(fmt::format("key '{}' appears outside any section", name));
    }
  }
  const auto section = [&](const char* name) {
    const auto it = tree.find(name);
    return Section(name, it == tree.not_found() ? nullptr : &it->second);
  };

  ExperimentConfig c;
  {
    auto s = section("experiment");
    std::string preset_name;
    s.read("preset", preset_name);
    if (!preset_name.empty() && preset_name != "custom") c = preset(preset_name);
    if (auto v = s.raw("algorithms")) {
      c.algorithms.clear();
      for (const auto& tag : split(*v, ',')) c.algorithms.push_back(parse_algorithm_tag(tag));
    }
    s.read("snapshot_every", c.snapshot_every);
    s.read("out", c.out_dir);
    s.check_unused();
  }
  {
    auto s = section("payoff");
    s.read("name", c.payoff.name);
    s.read("slope_g", c.payoff.slope_g);
    s.read("wave_g", c.payoff.wave_g);
    s.read("slope_h", c.payoff.slope_h);
    s.read("wave_h", c.payoff.wave_h);
    s.check_unused();
  }
  {
    auto s = section("base");
    s.read("name", c.base);
    s.check_unused();
  }
  {
    auto s = section("run");
    s.read("temperature", c.run.temperature);
    s.read("step", c.run.step);
    s.read("particles", c.run.particles);
    s.read("epochs", c.run.epochs);
    s.read_u64("seed", c.run.seed);
    s.read("weight_exponent", c.run.weight_exponent);
    s.read("noise", c.run.noise);
    s.read("threads", c.run.threads);
    if (auto v = s.raw("ag_mode")) {
      const auto m = lower(*v);
      if (m == "rolling") {
        c.run.ag_mode = AgMode::kRolling;
      } else if (m == "history") {
        c.run.ag_mode = AgMode::kHistory;
      } else {
        s.fail("ag_mode", *v, "rolling or history");
      }
    }
    s.read("history_cap", c.run.history_cap);
    s.check_unused();
  }
  {
    auto s = section("abr");
    s.read("outer", c.run.abr.outer);
    s.read("inner", c.run.abr.inner);
    s.read("mix", c.run.abr.mix);
    s.read("warm_start", c.run.abr.warm_start);
    s.check_unused();
  }
  {
    auto s = section("init");
    s.read("shift_mu", c.shift_mu);
    s.read("shift_nu", c.shift_nu);
    s.check_unused();
  }
  {
    auto s = section("metrics");
    if (auto v = s.raw("ni")) c.ni = parse_ni(*v);
    s.read("grid_nodes", c.grid.nodes);
    s.read("grid_half_width", c.grid.half_width);
    s.read("grid_tolerance", c.grid.tolerance);
    s.check_unused();
  }
  if (tree.find("markov") != tree.not_found()) {
    auto s = section("markov");
    MarkovSpec m = c.markov.value_or(MarkovSpec{});
    s.read("states", m.states);
    s.read("discount", m.discount);
    s.read("rounds", m.rounds);
    if (auto v = s.raw("solver")) m.solver = parse_algorithm_tag(*v);
    s.read("ni_tolerance", m.ni_tolerance);
    s.read("reward", m.reward);
    s.read("reward_a", m.reward_a);
    s.read("reward_b", m.reward_b);
    s.read("reward_c", m.reward_c);
    s.read("reward_d", m.reward_d);
    s.read("transition", m.transition);
    s.read_matrix("transition_matrix", m.transition_matrix);
    s.read("transition_a", m.transition_a);
    s.read("transition_b", m.transition_b);
    s.read("transition_c", m.transition_c);
    if (auto v = s.raw("noise")) {
      const auto t = lower(*v);
      if (t == "none") {
        m.noise.mode = BellmanNoise::Mode::kNone;
      } else if (t == "worst-case") {
        m.noise.mode = BellmanNoise::Mode::kWorstCase;
      } else if (t == "uniform") {
        m.noise.mode = BellmanNoise::Mode::kUniform;
      } else {
        s.fail("noise", *v, "none, worst-case or uniform");
      }
    }
    s.read("noise_epsilon", m.noise.epsilon);
    s.read("initial_values", m.initial_values);
    s.read("state_threads", m.state_threads);
    s.check_unused();
    c.markov = m;
  }
  c.validate();
  return c;
}

std::string to_ini(const ExperimentConfig& c) {
  std::vector<std::string> algs;
  for (const auto a : c.algorithms) algs.emplace_back(algorithm_tag(a));
  std::string out;
  const auto line = [&](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  const auto num = [](double v) { return fmt::format("{}", v); };
  const auto flag = [](bool b) { return std::string(b ? "true" : "false"); };

  out += "[experiment]\n";
  line("preset", c.preset);
  line("algorithms", join(algs));
  line("snapshot_every", std::to_string(c.snapshot_every));
  line("out", c.out_dir);
  out += "\n[payoff]\n";
  line("name", c.payoff.name);
  line("slope_g", num(c.payoff.slope_g));
  line("wave_g", num(c.payoff.wave_g));
  line("slope_h", num(c.payoff.slope_h));
  line("wave_h", num(c.payoff.wave_h));
  out += "\n[base]\n";
  line("name", c.base);
  out += "\n[run]\n";
  line("temperature", num(c.run.temperature));
  line("step", num(c.run.step));
  line("particles", std::to_string(c.run.particles));
  line("epochs", std::to_string(c.run.epochs));
  line("seed", std::to_string(c.run.seed));
  line("weight_exponent", num(c.run.weight_exponent));
  line("noise", flag(c.run.noise));
  line("threads", std::to_string(c.run.threads));
  line("ag_mode", ag_mode_tag(c.run.ag_mode));
  line("history_cap", std::to_string(c.run.history_cap));
  out += "\n[abr]\n";
  line("outer", std::to_string(c.run.abr.outer));
  line("inner", std::to_string(c.run.abr.inner));
  line("mix", num(c.run.abr.mix));
  line("warm_start", flag(c.run.abr.warm_start));
  out += "\n[init]\n";
  line("shift_mu", num(c.shift_mu));
  line("shift_nu", num(c.shift_nu));
  out += "\n[metrics]\n";
  line("ni", ni_tag(c.ni));
  line("grid_nodes", std::to_string(c.grid.nodes));
  line("grid_half_width", num(c.grid.half_width));
  line("grid_tolerance", num(c.grid.tolerance));
  if (c.markov) {
    const auto& m = *c.markov;
    out += "\n[markov]\n";
    line("states", join(m.states));
    line("discount", num(m.discount));
    line("rounds", std::to_string(m.rounds));
    line("solver", std::string(algorithm_tag(m.solver)));
    line("ni_tolerance", num(m.ni_tolerance));
    line("reward", m.reward);
    line("reward_a", list(m.reward_a));
    line("reward_b", list(m.reward_b));
    line("reward_c", list(m.reward_c));
    line("reward_d", list(m.reward_d));
    line("transition", m.transition);
    line("transition_matrix", matrix(m.transition_matrix));
    line("transition_a", list(m.transition_a));
    line("transition_b", list(m.transition_b));
    line("transition_c", list(m.transition_c));
    line("noise", noise_tag(m.noise.mode));
    line("noise_epsilon", num(m.noise.epsilon));
    line("initial_values", list(m.initial_values));
    line("state_threads", std::to_string(m.state_threads));
  }
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read configuration file '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("malformed manifest '{}': {}", path, e.what()));
    }
    if (!manifest.contains("config") || !manifest["config"].is_string()) {
      throw ConfigError(fmt::format("manifest '{}' has no string field 'config'", path));
    }
    return parse_ini(manifest["config"].get<std::string>());
  }
  return parse_ini(text);
}

// --- Validation and construction -------------------------------------------

void ExperimentConfig::validate() const {
  const auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    }
  };
  static const std::set<std::string> payoffs{"sigmoid", "quadratic", "separable"};
  if (!payoffs.count(payoff.name)) {
    throw ConfigError(fmt::format("unknown payoff '{}' (sigmoid, quadratic, separable)",
                                  payoff.name));
  }
  if (base != "standard-gaussian") {
    throw ConfigError(fmt::format("unknown base measure '{}' (standard-gaussian)", base));
  }
  if (snapshot_every < 1) {
    throw ConfigError(fmt::format("snapshot_every must be >= 1, got {}", snapshot_every));
  }
  if (grid.nodes < 3 || !(grid.half_width > 0.0) || !(grid.tolerance > 0.0)) {
    throw ConfigError("metrics grid needs >= 3 nodes and positive half width and tolerance");
  }
  if (out_dir.empty()) throw ConfigError("output directory must not be empty");

  if (markov) {
    if (markov->state_threads < 0) throw ConfigError("state_threads must be >= 0");
    wrap([&] {
      SchemeConfig scheme;
      scheme.solver = markov->solver;
      scheme.run = run;
      scheme.ni_tolerance = markov->ni_tolerance;
      scheme.rounds = markov->rounds;
      scheme.noise = markov->noise;
      scheme.validate();
      build_game(*this)->validate();
    });
    if (!markov->initial_values.empty() && markov->initial_values.size() != markov->states.size()) {
      throw ConfigError("initial_values needs one entry per state");
    }
    return;
  }

  if (algorithms.empty()) throw ConfigError("no algorithm configured");
  std::set<Algorithm> seen(algorithms.begin(), algorithms.end());
  if (seen.size() != algorithms.size()) throw ConfigError("algorithms must not repeat");
  if (ni == NiMode::kThreePoint && algorithms.size() != 3) {
    throw ConfigError(fmt::format("three-point NI needs exactly three algorithms, got {}",
                                  algorithms.size()));
  }
  if (!std::isfinite(shift_mu) || !std::isfinite(shift_nu)) {
    throw ConfigError("initial shifts must be finite");
  }
  wrap([&] {
    for (const auto a : algorithms) {
      run.validate(a);
      if (a == Algorithm::kAnchoredBestResponse && snapshot_every % run.abr.inner != 0) {
        throw ConfigError(fmt::format(
            "snapshot_every = {} must be a multiple of the ABR inner loop length {}",
            snapshot_every, run.abr.inner));
      }
    }
    build_problem(*this).validate();
  });
}

MinimaxProblem build_problem(const ExperimentConfig& c) {
  PayoffPtr q;
  if (c.payoff.name == "sigmoid") {
    q = std::make_shared<SigmoidPayoff>();
  } else if (c.payoff.name == "quadratic") {
    q = std::make_shared<QuadraticPayoff>();
  } else if (c.payoff.name == "separable") {
    q = SeparablePayoff::linear_wave(c.payoff.slope_g, c.payoff.wave_g, c.payoff.slope_h,
                                     c.payoff.wave_h);
  } else {
    throw ConfigError(fmt::format("unknown payoff '{}'", c.payoff.name));
  }
  return MinimaxProblem::bilinear(std::move(q));
}

RunConfig build_run(const ExperimentConfig& c, const MinimaxProblem& problem) {
  RunConfig run = c.run;
  if (c.shift_mu != 0.0) {
    ParticleSet x = sample_base(problem.base_mu, run.particles, run.seed, StreamTag::kInitMu);
    for (double& v : x.coordinates()) v += c.shift_mu;
    run.init_mu = std::move(x);
  }
  if (c.shift_nu != 0.0) {
    ParticleSet y = sample_base(problem.base_nu, run.particles, run.seed, StreamTag::kInitNu);
    for (double& v : y.coordinates()) v += c.shift_nu;
    run.init_nu = std::move(y);
  }
  return run;
}

std::shared_ptr<MarkovGame> build_game(const ExperimentConfig& c) {
  if (!c.markov) throw ConfigError("configuration has no [markov] section");
  const auto& m = *c.markov;
  const std::size_t n = m.states.size();
  if (n == 0) throw ConfigError("[markov] states must not be empty");
  const auto sized = [&](const std::vector<double>& v, const char* key, double fill) {
    if (v.empty()) return std::vector<double>(n, fill);
    if (v.size() != n) {
      throw ConfigError(fmt::format("[markov] {} has {} entries for {} states", key, v.size(), n));
    }
    return v;
  };
  auto game = std::make_shared<MarkovGame>();
  game->states = m.states;
  game->discount = m.discount;
  game->temperature = c.run.temperature;
  if (m.reward == "constant") {
    game->reward = RewardModel::constant(sized(m.reward_d, "reward_d", 0.0));
  } else if (m.reward == "quadratic") {
    const auto a = sized(m.reward_a, "reward_a", 0.0), b = sized(m.reward_b, "reward_b", 0.0),
               cc = sized(m.reward_c, "reward_c", 0.0), d = sized(m.reward_d, "reward_d", 0.0);
    std::vector<RewardModel::Quadratic> per(n);
    for (std::size_t s = 0; s < n; ++s) per[s] = {a[s], b[s], cc[s], d[s]};
    game->reward = RewardModel::quadratic(per);
  } else {
    throw ConfigError(fmt::format("unknown reward family '{}' (constant, quadratic)", m.reward));
  }
  if (m.transition == "constant") {
    auto mat = m.transition_matrix;
    if (mat.empty()) {
      mat.assign(n, std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }
    if (mat.size() != n) {
      throw ConfigError(fmt::format("[markov] transition_matrix has {} rows for {} states",
                                    mat.size(), n));
    }
    for (const auto& row : mat) {
      if (row.size() != n) throw ConfigError("[markov] transition_matrix must be square");
    }
    game->transition = TransitionModel::constant(mat);
  } else if (m.transition == "logistic") {
    if (n < 2) throw ConfigError("logistic transitions need at least two states");
    const auto a = sized(m.transition_a, "transition_a", 0.0),
               b = sized(m.transition_b, "transition_b", 0.0),
               cc = sized(m.transition_c, "transition_c", 0.0);
    std::vector<TransitionModel::Logistic> per(n);
    for (std::size_t s = 0; s < n; ++s) per[s] = {a[s], b[s], cc[s]};
    game->transition = TransitionModel::logistic(per);
  } else {
    throw ConfigError(
        fmt::format("unknown transition family '{}' (constant, logistic)", m.transition));
  }
  return game;
}

}  // namespace mfl::cli
