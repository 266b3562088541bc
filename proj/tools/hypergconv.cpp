// hypergconv <kind> --config <path> [--seed N] [--out DIR]
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <omp.h>

#include <CLI11.hpp>

#include "hypergconv/errors.hpp"
#include "hypergconv/harness.hpp"

namespace {

void apply_thread_cap() {
  if (const char* env = std::getenv("HYPERGCONV_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial constructions for g-convex optimization on hyperbolic space"};
  std::string kind;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> kinds = hgc::kKinds;
  kinds.push_back("sweep");
  app.add_option("kind", kind, "experiment kind")->required()->check(CLI::IsMember(kinds));
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", out_dir, "output directory for summary.csv and transcript.json");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  apply_thread_cap();

  hgc::ExperimentConfig cfg;
  hgc::Json grid;
  try {
    std::ifstream in(config_path);
    if (!in) throw hgc::ConfigError("cannot open config: " + config_path);
    hgc::Json j;
    try {
      in >> j;
    } catch (const hgc::Json::exception& e) {
      throw hgc::ConfigError(std::string("config parse error: ") + e.what());
    }
    cfg = hgc::ExperimentConfig::from_json(j);
    if (kind != "sweep") {
      if (!cfg.kind.empty() && cfg.kind != kind) throw hgc::ConfigError("config kind '" + cfg.kind + "' != " + kind);
      cfg.kind = kind;
    } else if (cfg.kind.empty()) {
      throw hgc::ConfigError("sweep config needs a kind");
    }
    if (j.contains("grid")) grid = j.at("grid");
    if (kind == "sweep" && grid.is_null()) grid = hgc::Json::object();
    if (seed) cfg.seed = *seed;
  } catch (const hgc::ConfigError& e) {
    std::cerr << "hypergconv: " << e.what() << "\n";
    return 2;
  }

  hgc::RunResult res;
  try {
    res = grid.is_null() ? hgc::run_experiment(cfg) : hgc::sweep(cfg, grid);
  } catch (const hgc::ConfigError& e) {
    std::cerr << "hypergconv: " << e.what() << "\n";
    return 2;
  } catch (const hgc::Error& e) {
    std::cerr << "hypergconv: " << e.what() << "\n";
    return 1;
  }

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream csv(std::filesystem::path(out_dir) / "summary.csv", std::ios::binary);
    csv << hgc::to_csv(res.rows);
  }
  {
    std::ofstream js(std::filesystem::path(out_dir) / "transcript.json", std::ios::binary);
    res.transcript["rows"] = res.rows.size();
    js << res.transcript.dump(1) << "\n";
  }
  int failed = 0;
  for (const auto& r : res.rows) failed += r.pass ? 0 : 1;
  std::cout << cfg.kind << ": " << res.rows.size() - failed << "/" << res.rows.size() << " rows passed\n";
  if (const hgc::Row* bad = res.first_failure()) {
    std::cerr << "FAIL " << hgc::csv_row(*bad) << "\n";
    return 1;
  }
  return 0;
}
