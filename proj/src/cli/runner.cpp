#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "mfl/cli.hpp"
#include "mfl/errors.hpp"
#include "mfl/log.hpp"

namespace mfl::cli {
namespace {

namespace fs = std::filesystem;

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    out_ << header << '\n';
  }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw std::runtime_error(fmt::format("error writing '{}'", path_.string()));
  }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(std::string_view s) { return std::string(s); }
  template <typename T>
    requires std::is_integral_v<T>
  static std::string cell(T v) {
    return std::to_string(v);
  }

  fs::path path_;
  std::ofstream out_;
};

void write_manifest(const fs::path& dir, const ExperimentConfig& cfg,
                    const std::vector<std::string>& outputs, const std::string& status) {
  nlohmann::ordered_json j;
  j["tool"] = "mfl";
  j["version"] = kVersion;
  j["preset"] = cfg.preset;
  j["seed"] = cfg.run.seed;
  j["status"] = status;
  j["config"] = to_ini(cfg);
  j["outputs"] = outputs;
  std::ofstream out(dir / "meta.json");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("error writing meta.json");
}

bool use_three_point(const ExperimentConfig& cfg) {
  if (cfg.ni == NiMode::kThreePoint) return true;
  if (cfg.ni != NiMode::kAuto || cfg.algorithms.size() != 3) return false;
  const auto t = total_epochs(cfg.algorithms[0], cfg.run);
  for (const auto a : cfg.algorithms) {
    if (total_epochs(a, cfg.run) != t) return false;
  }
  return true;
}

const Snapshot* find_snapshot(const Trajectory& t, std::int64_t epoch) {
  for (const auto& s : t.snapshots) {
    if (s.epoch == epoch) return &s;
  }
  return nullptr;
}

void write_points(CsvFile& csv, std::string_view alg, const char* kind, std::int64_t epoch,
                  const char* player, const ParticleSet& p) {
  const auto v = p.coordinates();
  for (std::size_t i = 0; i < p.size(); ++i) csv.row(alg, kind, epoch, player, i, v[i]);
}

// Returns the process exit code.
int run_minimax(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out,
                std::ostream& err) {
  const MinimaxProblem problem = build_problem(cfg);
  const RunConfig run = build_run(cfg, problem);

  std::vector<Trajectory> runs;
  std::string failure;
  for (const auto alg : cfg.algorithms) {
    runs.emplace_back();
    try {
      run_experiment(alg, problem, run, cfg.snapshot_every, runs.back());
      if (!quiet()) {
        out << fmt::format("{}: {} epochs\n", algorithm_tag(alg), runs.back().final_epoch);
      }
    } catch (const NumericalFailure& e) {
      failure = fmt::format("{}: {}", algorithm_tag(alg), e.what());
      break;
    }
  }

  std::vector<std::string> outputs{"snapshots.csv", "convergence.csv", "ni.csv"};
  {
    CsvFile csv(dir / "snapshots.csv", "algorithm,kind,epoch,player,index,x");
    for (const auto& t : runs) {
      const auto tag = algorithm_tag(t.algorithm);
      for (const auto& s : t.snapshots) {
        write_points(csv, tag, "iterate", s.epoch, "mu", s.x);
        write_points(csv, tag, "iterate", s.epoch, "nu", s.y);
        write_points(csv, tag, "output", s.epoch, "mu", s.x_out);
        write_points(csv, tag, "output", s.epoch, "nu", s.y_out);
      }
    }
    csv.close();
  }
  {
    CsvFile csv(dir / "convergence.csv", "algorithm,epoch,w1_mu,w1_nu");
    for (const auto& t : runs) {
      for (const auto& s : t.steps) csv.row(algorithm_tag(t.algorithm), s.epoch, s.w1_mu, s.w1_nu);
    }
    csv.close();
  }
  {
    CsvFile csv(dir / "ni.csv", "algorithm,epoch,method,ni,bias_budget");
    const auto payoff = problem.payoff();
    const double lambda = cfg.run.temperature;
    try {
      if (cfg.ni == NiMode::kNone || !payoff) {
        // header only
      } else if (use_three_point(cfg) && runs.size() == 3) {
        for (const auto& s0 : runs[0].snapshots) {
          std::vector<const Snapshot*> at;
          for (const auto& t : runs) at.push_back(find_snapshot(t, s0.epoch));
          if (at[1] == nullptr || at[2] == nullptr) continue;
          std::vector<CandidatePair> c;
          for (const auto* s : at) c.push_back({&s->x_out, &s->y_out});
          const auto ni =
              ni_three_point(*payoff, c, lambda, problem.base_mu, problem.base_nu, cfg.run.threads);
          for (std::size_t i = 0; i < 3; ++i) {
            csv.row(algorithm_tag(runs[i].algorithm), s0.epoch, "three-point", ni[i], "");
          }
        }
      } else {
        for (const auto& t : runs) {
          for (const auto& s : t.snapshots) {
            const auto ni = ni_quadrature(*payoff, s.x_out, s.y_out, lambda, problem.base_mu,
                                          problem.base_nu, cfg.grid);
            csv.row(algorithm_tag(t.algorithm), s.epoch, "quadrature", ni.value, ni.bias_budget);
          }
        }
      }
    } catch (const NumericalFailure& e) {
      if (failure.empty()) failure = fmt::format("NI: {}", e.what());
    }
    csv.close();
  }
  write_manifest(dir, cfg, outputs, failure.empty() ? "ok" : "numerical-failure");
  if (!failure.empty()) {
    err << "numerical failure: " << failure << '\n';
    return 2;
  }
  return 0;
}

int run_markov(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out,
               std::ostream& err) {
  const auto game = build_game(cfg);
  const auto& m = *cfg.markov;
  SchemeConfig scheme;
  scheme.solver = m.solver;
  scheme.run = cfg.run;
  scheme.ni_tolerance = m.ni_tolerance;
  scheme.rounds = m.rounds;
  scheme.noise = m.noise;
  scheme.grid = cfg.grid;
  scheme.state_threads = m.state_threads;
  const std::uint64_t seed = cfg.run.seed;

  std::vector<ValueIterate> iterates;
  std::vector<double> gaps;
  std::string failure;
  std::optional<std::vector<double>> v0;
  if (!m.initial_values.empty()) v0 = m.initial_values;
  iterates.push_back(initial_iterate(*game, v0));
  try {
    for (int k = 0; k < m.rounds; ++k) {
      auto& current = iterates.back();
      current.policies = step1_minimax(game, current, scheme, seed);
      for (std::size_t s = 0; s < game->size(); ++s) {
        if (!current.policies[s].failure.empty()) {
          throw NumericalFailure(fmt::format("round {} state {}: {}", k, game->states[s],
                                             current.policies[s].failure));
        }
      }
      ValueIterate next = step2_value_update(game, current, current.policies, scheme, seed);
      gaps.push_back(sup_distance(next.values, current.values));
      if (!quiet()) out << fmt::format("round {}: gap {}\n", k + 1, format_double(gaps.back()));
      iterates.push_back(std::move(next));
    }
  } catch (const NumericalFailure& e) {
    failure = e.what();
  }

  std::vector<std::string> outputs{"values.csv", "gaps.csv", "ni.csv"};
  {
    CsvFile csv(dir / "values.csv", "round,state,value,offset");
    for (const auto& it : iterates) {
      for (std::size_t s = 0; s < game->size(); ++s) {
        csv.row(it.round, game->states[s], it.values[s], it.offsets[s]);
      }
    }
    csv.close();
  }
  {
    CsvFile csv(dir / "gaps.csv", "round,gap");
    for (std::size_t k = 0; k < gaps.size(); ++k) csv.row(k + 1, gaps[k]);
    csv.close();
  }
  {
    CsvFile csv(dir / "ni.csv", "round,state,ni,above_tolerance");
    for (const auto& it : iterates) {
      if (it.policies.empty()) continue;
      for (std::size_t s = 0; s < game->size(); ++s) {
        const auto& p = it.policies[s];
        if (!p.failure.empty()) continue;
        csv.row(it.round, game->states[s], p.ni, p.above_tolerance ? 1 : 0);
      }
    }
    csv.close();
  }
  write_manifest(dir, cfg, outputs, failure.empty() ? "ok" : "numerical-failure");
  if (!failure.empty()) {
    err << "numerical failure: " << failure << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-field Langevin minimax solver", "mfl"};
  std::string preset_name, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool quiet_flag = false;
  auto* p = app.add_option("--preset", preset_name, "built-in experiment")
                ->check(CLI::IsMember(preset_names()));
  auto* c = app.add_option("--config", config_path, "INI configuration or meta.json manifest");
  p->excludes(c);
  c->excludes(p);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", quiet_flag, "suppress progress and warnings");
  app.set_version_flag("--version", kVersion);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  ExperimentConfig cfg;
  try {
    if (preset_name.empty() && config_path.empty()) {
      throw ConfigError("one of --preset or --config is required");
    }
    cfg = preset_name.empty() ? load_config(config_path) : preset(preset_name);
    if (seed) cfg.run.seed = *seed;
    if (threads) cfg.run.threads = *threads;
    if (!out_dir.empty()) {
      cfg.out_dir = out_dir;
    } else if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
      cfg.out_dir = env;
    }
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  set_quiet(quiet_flag);
  const fs::path dir(cfg.out_dir);
  try {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      err << fmt::format("error: cannot create output directory '{}'\n", dir.string());
      return 1;
    }
    return cfg.markov ? run_markov(cfg, dir, out, err) : run_minimax(cfg, dir, out, err);
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mfl::cli
