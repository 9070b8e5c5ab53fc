#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mfl/cli.hpp"
#include "mfl/dynamics.hpp"

using namespace mfl;
using namespace mfl::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("mfl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    unsetenv(kOutDirEnv);
  }
  void TearDown() override {
    unsetenv(kOutDirEnv);
    fs::remove_all(root_);
  }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = root_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  fs::path root_;
  std::ostringstream out_, err_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

const char* kSmall = R"([experiment]
algorithms = ag, abr, da
snapshot_every = 10

[payoff]
name = sigmoid

[run]
temperature = 0.05
step = 0.2
particles = 12
epochs = 20
seed = 5

[abr]
outer = 4
inner = 5
mix = 0.25
)";

}  // namespace

TEST(Presets, FigureOneSettings) {
  const auto c = preset("figure1");
  EXPECT_EQ(c.payoff.name, "sigmoid");
  EXPECT_EQ(c.base, "standard-gaussian");
  EXPECT_EQ(c.run.temperature, 0.01);
  EXPECT_EQ(c.run.particles, 1000);
  EXPECT_EQ(c.run.epochs, 1000);
  EXPECT_EQ(c.run.step, 0.3);
  EXPECT_EQ(c.run.weight_exponent, 1.0);
  EXPECT_EQ(c.run.abr.outer, 50);
  EXPECT_EQ(c.run.abr.inner, 20);
  EXPECT_EQ(c.run.abr.mix, 0.15);
  EXPECT_TRUE(c.run.abr.warm_start);
  EXPECT_EQ(c.algorithms.size(), 3u);
  EXPECT_EQ(snapshot_epochs(total_epochs(Algorithm::kDescentAscent, c.run), c.snapshot_every).size(),
            11u);
}

TEST(Presets, AllValidateAndRoundTrip) {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    EXPECT_NO_THROW(c.validate()) << name;
    const auto text = to_ini(c);
    EXPECT_EQ(to_ini(parse_ini(text)), text) << name;
  }
  EXPECT_THROW(preset("figure2"), ConfigError);
}

TEST(Config, PresetWithOverrides) {
  const auto c = parse_ini("[experiment]\npreset = figure1\n[run]\nseed = 9\nparticles = 200\n");
  EXPECT_EQ(c.run.seed, 9u);
  EXPECT_EQ(c.run.particles, 200);
  EXPECT_EQ(c.run.temperature, 0.01);
}

TEST(Config, RejectsUnknownNamesAndBadValues) {
  EXPECT_THROW(parse_ini("[run]\nstepp = 0.1\n"), ConfigError);
  EXPECT_THROW(parse_ini("[solver]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_ini("[run]\nstep = fast\n"), ConfigError);
  EXPECT_THROW(parse_ini("[run]\nstep = -1\n"), ConfigError);
  EXPECT_THROW(parse_ini("[payoff]\nname = cubic\n"), ConfigError);
  EXPECT_THROW(parse_ini("[experiment]\nalgorithms = sgd\n"), ConfigError);
  EXPECT_THROW(parse_ini("[run]\nseed = -3\n"), ConfigError);
  EXPECT_THROW(parse_ini("[run\nstep = 1\n"), ConfigError);
  EXPECT_THROW(parse_ini("[metrics]\nni = three-point\n"), ConfigError);  // one algorithm
}

TEST(Config, AbrCadenceMustAlignWithInnerLoop) {
  std::string text = kSmall;
  text.replace(text.find("snapshot_every = 10"), 19, "snapshot_every = 7");
  EXPECT_THROW(parse_ini(text), ConfigError);
}

TEST(Config, ExactDoublesSurviveRoundTrip) {
  auto c = preset("quadratic-oracle");
  c.run.step = 0.1 + 0.2;
  c.shift_mu = 1.0 / 3.0;
  const auto back = parse_ini(to_ini(c));
  EXPECT_EQ(back.run.step, c.run.step);
  EXPECT_EQ(back.shift_mu, c.shift_mu);
}

TEST(Config, BuildRunAppliesShifts) {
  auto c = preset("quadratic-oracle");
  c.run.particles = 50;
  c.shift_mu = 1.0;
  c.shift_nu = -2.0;
  const auto problem = build_problem(c);
  const auto run = build_run(c, problem);
  const auto base = sample_base(problem.base_mu, 50, c.run.seed, StreamTag::kInitMu);
  ASSERT_TRUE(run.init_mu && run.init_nu);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ((*run.init_mu)[i][0], base[i][0] + 1.0);
}

TEST_F(CliTest, MalformedConfigWritesNothing) {
  const auto cfg = write("bad.ini", "[run]\nstepp = 1\n");
  EXPECT_EQ(run({"--config", cfg.string(), "--out", (root_ / "out").string()}), 1);
  EXPECT_FALSE(fs::exists(root_ / "out"));
  EXPECT_NE(err_.str().find("stepp"), std::string::npos);
}

TEST_F(CliTest, FlagErrors) {
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"--preset", "nope"}), 1);
  EXPECT_EQ(run({"--preset", "figure1", "--config", "x.ini"}), 1);
  EXPECT_EQ(run({"--config", (root_ / "missing.ini").string()}), 1);
  EXPECT_EQ(run({"--preset", "figure1", "--threads", "-2"}), 1);
  EXPECT_EQ(run({"--version"}), 0);
  EXPECT_EQ(out_.str(), std::string(kVersion) + "\n");
}

TEST_F(CliTest, RowCountsArePredictable) {
  const auto cfg = write("small.ini", kSmall);
  const auto out = root_ / "out";
  ASSERT_EQ(run({"--config", cfg.string(), "--out", out.string(), "--quiet"}), 0) << err_.str();
  const std::size_t n = 12, snaps = 3, algs = 3;
  EXPECT_EQ(lines(out / "snapshots.csv"), 1 + algs * snaps * 2 * 2 * n);
  // da and ag: one step distance per epoch; abr: one per outer iteration
  EXPECT_EQ(lines(out / "convergence.csv"), 1 + 20 + 20 + 4);
  EXPECT_EQ(lines(out / "ni.csv"), 1 + snaps * algs);
  EXPECT_EQ(slurp(out / "ni.csv").substr(0, 37), "algorithm,epoch,method,ni,bias_budget");
  const auto meta = nlohmann::json::parse(slurp(out / "meta.json"));
  EXPECT_EQ(meta["version"], kVersion);
  EXPECT_EQ(meta["seed"], 5);
  EXPECT_EQ(meta["status"], "ok");
}

TEST_F(CliTest, QuadratureNiForOtherAlgorithmCounts) {
  const auto cfg = write("two.ini", std::string(kSmall).replace(
                                        std::string(kSmall).find("ag, abr, da"), 11, "ag, da"));
  const auto out = root_ / "out";
  ASSERT_EQ(run({"--config", cfg.string(), "--out", out.string(), "--quiet"}), 0) << err_.str();
  EXPECT_EQ(lines(out / "ni.csv"), 1u + 2 * 3);
  EXPECT_NE(slurp(out / "ni.csv").find(",quadrature,"), std::string::npos);
}

TEST_F(CliTest, SeedFlagReproducesBytes) {
  const auto a = root_ / "a", b = root_ / "b";
  ASSERT_EQ(run({"--preset", "quadratic-oracle", "--seed", "7", "--out", a.string(), "--quiet"}), 0);
  ASSERT_EQ(run({"--preset", "quadratic-oracle", "--seed", "7", "--out", b.string(), "--quiet"}), 0);
  for (const auto* f : {"snapshots.csv", "convergence.csv", "ni.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(nlohmann::json::parse(slurp(a / "meta.json"))["seed"], 7);
}

TEST_F(CliTest, ManifestReplaysRun) {
  const auto cfg = write("small.ini", kSmall);
  const auto a = root_ / "a", b = root_ / "b";
  ASSERT_EQ(run({"--config", cfg.string(), "--out", a.string(), "--seed", "11", "--quiet"}), 0);
  ASSERT_EQ(run({"--config", (a / "meta.json").string(), "--quiet"}), 0);  // writes into a again
  ASSERT_EQ(run({"--config", (a / "meta.json").string(), "--out", b.string(), "--quiet"}), 0);
  for (const auto* f : {"snapshots.csv", "convergence.csv", "ni.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST_F(CliTest, OutputDirectoryPrecedence) {
  const auto cfg = write("small.ini", std::string(kSmall) + "\n");
  setenv(kOutDirEnv, (root_ / "env").string().c_str(), 1);
  ASSERT_EQ(run({"--config", cfg.string(), "--quiet"}), 0);
  EXPECT_TRUE(fs::exists(root_ / "env" / "meta.json"));
  ASSERT_EQ(run({"--config", cfg.string(), "--out", (root_ / "flag").string(), "--quiet"}), 0);
  EXPECT_TRUE(fs::exists(root_ / "flag" / "meta.json"));
}

TEST_F(CliTest, DivergenceExitsTwoWithPartialOutputs) {
  const auto cfg = write("div.ini", R"([experiment]
algorithms = da
snapshot_every = 10
[payoff]
name = quadratic
[run]
temperature = 1
step = 5000
particles = 10
epochs = 200
)");
  const auto out = root_ / "out";
  EXPECT_EQ(run({"--config", cfg.string(), "--out", out.string(), "--quiet"}), 2);
  EXPECT_GT(lines(out / "convergence.csv"), 1u);
  EXPECT_LT(lines(out / "convergence.csv"), 201u);
  EXPECT_EQ(nlohmann::json::parse(slurp(out / "meta.json"))["status"], "numerical-failure");
}

TEST_F(CliTest, MarkovRun) {
  const auto cfg = write("markov.ini", R"([run]
temperature = 0
step = 0.1
particles = 20
epochs = 5
[markov]
states = a, b
discount = 0.5
rounds = 3
reward = constant
reward_d = 1, 2
transition = constant
transition_matrix = 0.5, 0.5; 0.2, 0.8
)");
  const auto out = root_ / "out";
  ASSERT_EQ(run({"--config", cfg.string(), "--out", out.string(), "--quiet"}), 0) << err_.str();
  EXPECT_EQ(lines(out / "values.csv"), 1u + 4 * 2);
  EXPECT_EQ(lines(out / "gaps.csv"), 1u + 3);
  EXPECT_EQ(lines(out / "ni.csv"), 1u + 3 * 2);
  // V^(1) = r, since V^(0) = 0
  EXPECT_NE(slurp(out / "values.csv").find("1,b,2,0"), std::string::npos);
}
