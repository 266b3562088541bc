#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hypergconv/harness.hpp"

using namespace hgc;
namespace fs = std::filesystem;

namespace {

ExperimentConfig lb_config() {
  return ExperimentConfig::from_json(
      Json::parse(R"({"kind": "lb-nonsmooth", "seed": 3, "params": {"players": ["polyak"], "sandwich_samples": 10}})"));
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hypergconv_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }
  int run(const std::string& args) {
    const std::string cmd = std::string(HYPERGCONV_CLI) + " " + args + " --out " + (dir_ / "out").string() +
                            " >" + (dir_ / "stdout").string() + " 2>" + (dir_ / "stderr").string();
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }
  std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  fs::path dir_;
};

}  // namespace

TEST(Csv, FieldQuotingAndNumbers) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(fmt_double(0.1), "0.1");
  EXPECT_EQ(fmt_double(std::numeric_limits<double>::infinity()), "inf");
  for (double v : {1.0 / 3.0, 2.5e-300, -7.123456789012345e12}) EXPECT_EQ(std::stod(fmt_double(v)), v);
}

TEST(Csv, HeaderAndRow) {
  EXPECT_EQ(csv_header(), "kind,instance,seed,params,measured,bound,pass,detail,runtime_ms");
  EXPECT_EQ(csv_header(false), "kind,instance,seed,params,measured,bound,pass,detail");
  const Row r{"interp", "x,y", 7, "a=1;b=2", 0.5, 1.0, true, "k=v", 12.3456};
  EXPECT_EQ(csv_row(r), "interp,\"x,y\",7,a=1;b=2,0.5,1,pass,k=v,12.346");
  EXPECT_EQ(csv_row(r, false), "interp,\"x,y\",7,a=1;b=2,0.5,1,pass,k=v");
  EXPECT_EQ(to_csv({}), csv_header() + "\n");
  EXPECT_EQ(lines(to_csv({r, r})).size(), 3u);
}

TEST(Config, Forms) {
  const ExperimentConfig a = ExperimentConfig::from_json(Json::parse(R"({"kind": "interp", "seed": 4, "params": {"d": 2}})"));
  EXPECT_EQ(a.kind, "interp");
  EXPECT_EQ(a.seed, 4u);
  EXPECT_EQ(a.params.at("d"), 2);
  const ExperimentConfig b = ExperimentConfig::from_json(Json::parse(R"({"kind": "interp", "seed": 4, "d": 2, "grid": {}})"));
  EXPECT_EQ(b.params, Json::parse(R"({"d": 2})"));
  EXPECT_THROW(ExperimentConfig::from_json(Json::parse(R"({"kind": "nope"})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(Json::parse(R"({"kind": "interp", "params": 3})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(Json::parse("[1, 2]")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_file("/nonexistent/config.json"), ConfigError);
}

TEST(Config, BadParametersAreConfigErrors) {
  ExperimentConfig c = lb_config();
  c.params["T"] = "four";
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = lb_config();
  c.params["players"] = Json::array({"nobody"});
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = lb_config();
  c.params["T"] = 1;
  EXPECT_THROW(run_experiment(c), ConfigError);
  ExperimentConfig w = ExperimentConfig::from_json(Json::parse(R"({"kind": "polyak-worst", "params": {"eps": 0.3}})"));
  EXPECT_THROW(run_experiment(w), ConfigError);
  EXPECT_THROW(sweep(lb_config(), Json::parse(R"({"T": 4})")), ConfigError);
  EXPECT_THROW(sweep(lb_config(), Json::parse("[]")), ConfigError);
}

TEST(Sweep, CartesianProductInOrder) {
  const RunResult r = sweep(lb_config(), Json::parse(R"({"r": [1, 2, 5], "T": [4, 8, 16]})"));
  ASSERT_EQ(r.rows.size(), 9u);
  ASSERT_EQ(r.transcript.at("cells").size(), 9u);
  // Keys in lexicographic order ("T" < "r"); the last key varies fastest.
  const char* want[] = {"T=4;r=1", "T=4;r=2", "T=4;r=5", "T=8;r=1", "T=8;r=2",
                        "T=8;r=5", "T=16;r=1", "T=16;r=2", "T=16;r=5"};
  for (int i = 0; i < 9; ++i) {
    EXPECT_EQ(r.rows[i].params.rfind(want[i], 0), 0u) << r.rows[i].params;
    EXPECT_TRUE(r.rows[i].pass) << csv_row(r.rows[i]);
  }
}

TEST(Sweep, EmptyGridHasNoRows) {
  const RunResult r = sweep(lb_config(), Json::parse(R"({"T": [4, 8], "r": []})"));
  EXPECT_TRUE(r.rows.empty());
  EXPECT_EQ(to_csv(r.rows), csv_header() + "\n");
}

TEST(Sweep, SingleCellMatchesRun) {
  ExperimentConfig base = lb_config();
  const RunResult s = sweep(base, Json::parse(R"({"T": [8], "r": [2], "seed": [9]})"));
  base.params["T"] = 8;
  base.params["r"] = 2;
  base.seed = 9;
  const RunResult d = run_experiment(base);
  EXPECT_EQ(to_csv(s.rows, false), to_csv(d.rows, false));
  EXPECT_EQ(s.rows.at(0).seed, 9u);
}

TEST(Determinism, SameConfigSameCsv) {
  const ExperimentConfig c = ExperimentConfig::from_json(
      Json::parse(R"({"kind": "interp", "seed": 5, "params": {"theta_points": 3, "sufficient_instances": 3, "minimal_triples": 20}})"));
  const RunResult a = run_experiment(c), b = run_experiment(c);
  EXPECT_EQ(to_csv(a.rows, false), to_csv(b.rows, false));
  EXPECT_EQ(a.transcript.dump(), b.transcript.dump());
  EXPECT_TRUE(a.pass());
  EXPECT_EQ(a.first_failure(), nullptr);
}

TEST_F(Cli, PassingRunWritesOutputs) {
  const fs::path cfg = write("c.json", R"({"kind": "interp", "seed": 2, "params": {"theta_points": 2, "sufficient_instances": 2, "minimal_triples": 10}})");
  EXPECT_EQ(run("interp --config " + cfg.string()), 0) << slurp(dir_ / "stderr");
  const auto csv = lines(slurp(dir_ / "out" / "summary.csv"));
  ASSERT_GE(csv.size(), 2u);
  EXPECT_EQ(csv[0], csv_header());
  const Json tj = Json::parse(slurp(dir_ / "out" / "transcript.json"));
  EXPECT_EQ(tj.at("rows").get<std::size_t>(), csv.size() - 1);
}

TEST_F(Cli, SeedOverrideAndSweep) {
  const fs::path cfg = write("c.json", R"({"kind": "interp", "seed": 2, "params": {"theta_points": 1, "sufficient_instances": 1, "minimal_triples": 0}, "grid": {"seed": [1, 2]}})");
  EXPECT_EQ(run("sweep --config " + cfg.string()), 0) << slurp(dir_ / "stderr");
  EXPECT_EQ(lines(slurp(dir_ / "out" / "summary.csv")).size(), 1u + 2u * 3u);
  const fs::path one = write("one.json", R"({"kind": "interp", "seed": 2, "params": {"theta_points": 1, "sufficient_instances": 1, "minimal_triples": 0}})");
  EXPECT_EQ(run("interp --seed 77 --config " + one.string()), 0);
  EXPECT_NE(slurp(dir_ / "out" / "summary.csv").find(",77,"), std::string::npos);
}

TEST_F(Cli, FailingRowExitsOne) {
  const fs::path cfg = write("c.json", R"({"kind": "cut-game", "seed": 1, "params": {"d": 3, "r": 1.5, "eps": 0.1, "games": 1, "volume_check": false, "packing_fail_cap": 200, "quarter_fraction": 1.5}})");
  EXPECT_EQ(run("cut-game --config " + cfg.string()), 1) << slurp(dir_ / "stderr");
  EXPECT_NE(slurp(dir_ / "stderr").find("FAIL cut-game,quarter-law"), std::string::npos);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run("interp --config " + (dir_ / "missing.json").string()), 2);
  EXPECT_EQ(run("interp --config " + write("bad.json", "{not json").string()), 2);
  EXPECT_EQ(run("interp --config " + write("kind.json", R"({"kind": "cut-game"})").string()), 2);
  EXPECT_EQ(run("polyak-worst --config " + write("eps.json", R"({"params": {"eps": 0.3}})").string()), 2);
  EXPECT_EQ(run("nonsense --config " + write("ok.json", "{}").string()), 2);
  EXPECT_EQ(run("interp"), 2);
  EXPECT_EQ(run("sweep --config " + write("nokind.json", "{}").string()), 2);
}
