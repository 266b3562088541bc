#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypergconv/rng.hpp"
#include "hypergconv/transcript.hpp"

namespace hgc {

/// Experiment kinds accepted by run_experiment.
extern const std::vector<std::string> kKinds;

struct ExperimentConfig {
  std::string kind;
  Json params = Json::object();
  std::uint64_t seed = 0;

  /// {"kind": ..., "seed": ..., "params": {...}, "grid": {...}}. A top-level
  /// object without "params" is read as the parameter object itself. Throws
  /// ConfigError on unknown kinds or malformed JSON.
  static ExperimentConfig from_json(const Json& j);
  static ExperimentConfig from_file(const std::string& path);
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One CSV row per instance.
struct Row {
  std::string kind;
  std::string instance;
  std::uint64_t seed = 0;
  std::string params;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
  double runtime_ms = 0.0;
};

struct RunResult {
  std::vector<Row> rows;
  Json transcript = Json::object();
  bool pass() const;
  /// First failing row, or nullptr.
  const Row* first_failure() const;
};

/// kind,instance,seed,params,measured,bound,pass,detail[,runtime_ms]
std::string csv_header(bool with_runtime = true);
std::string csv_row(const Row& row, bool with_runtime = true);
std::string to_csv(const std::vector<Row>& rows, bool with_runtime = true);

RunResult run_experiment(const ExperimentConfig& cfg);

/// Cartesian product of grid = {param: [values...]} layered over the base
/// parameters; one run per cell in lexicographic order of the grid keys.
/// A grid with an empty value list has no cells.
RunResult sweep(const ExperimentConfig& base, const Json& grid);

/// Random max-of-distance function max_i (dist(x, z_i) - rho_i) whose
/// minimum 0 is attained at xstar (the unit directions from xstar to the z_i
/// contain zero in their convex hull).
struct MaxDistanceInstance {
  FnPtr f;
  HPoint xstar;
  double fstar = 0.0;
  double lipschitz = 1.0;
};
MaxDistanceInstance random_max_distance(int d, int pieces, double spread, CounterRng& rng);

/// Point uniform by volume in B(center, radius).
HPoint random_in_ball(CounterRng& rng, const HPoint& center, double radius);

}  // namespace hgc
