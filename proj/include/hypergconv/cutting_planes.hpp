#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypergconv/hyperboloid.hpp"
#include "hypergconv/rng.hpp"

namespace hgc {

struct CutConfig {
  int d = 3;
  double r = 6.0;
  double eps = 0.0;  // 0 selects 1 / (320 (d - 1))
  int n_normal_samples = 512;
  std::uint64_t seed = 0;
  std::uint64_t packing_seed = 0;
  int max_rounds = 64;
  /// Cap on the consecutive-rejection stopping rule 200 * |A|.
  long packing_fail_cap = 20000;
  /// Neighbour proposals per active point in the frontier phase.
  int frontier_tries = 32;
  bool parallel = true;

  double effective_eps() const;
  /// Throws DomainError on d < 3, r <= 0, eps <= 0, eps >= 1 or n_normal_samples < 1.
  void validate() const;
};

struct Packing {
  std::vector<HPoint> centers;
  Eigen::MatrixXd coords;  // centers as columns
  double separation = 0.0; // 2 eps r
  double radius = 0.0;     // r - eps r
  long proposals = 0;
  long frontier_accepted = 0;
  long uniform_accepted = 0;
  long final_fail_run = 0;  // consecutive uniform rejections at the stop
  double floor_estimate = 0.0;   // 1/4 e^{(d-1) r / 4}
  double volume_estimate = 0.0;  // V_d(r - eps r) / V_d(2 eps r)
};

/// Maximal 2 eps r separated set in B(x_ref, r - eps r), x_ref = e0.
/// Points are first grown outward from accepted points (proposals at distance
/// [2 eps r, 4 eps r) from a random active point) and then topped up by
/// uniform rejection sampling until min(200 |A|, packing_fail_cap)
/// consecutive rejections. Deterministic in packing_seed.
Packing packing_build(const CutConfig& cfg);

/// Exact pairwise check through the spatial index: smallest pairwise distance
/// (+inf below two points).
double packing_min_distance(const Packing& p);

/// Point uniform by volume in B(e0, R) in H^d.
HPoint uniform_in_ball(CounterRng& rng, int d, double R);

/// Volume of the geodesic ball of radius r in H^d: sigma_{d-1} int_0^r sinh^{d-1}.
double volume_ball(int d, double r);
/// Surface area of the unit sphere S^{d-1}.
double sphere_area(int d);
/// sigma_{d-1} e^{r(d-1)} / ((d-1) 2^{d-1}): the upper bound on volume_ball.
double volume_upper_bound(int d, double r);
/// One quarter of volume_upper_bound; a lower bound once r >= 4 log d.
double volume_lower_bound(int d, double r);

struct CutRound {
  int k;
  HPoint x;
  HTangent g;
  int before;
  int after;
  int cut;
  int normal_index;
  bool quarter_ok;      // 4 after >= before
  bool consistent;      // every survivor consistent with the whole history
};

struct CutRespond {
  bool exhausted = false;
  HTangent g;
  int before = 0;
  int after = 0;
  int cut = 0;
  int normal_index = -1;
};

class CutGameState {
 public:
  CutGameState(const CutConfig& cfg, std::shared_ptr<const Packing> packing);

  const CutConfig& config() const { return cfg_; }
  double eps() const { return eps_; }
  const std::vector<int>& candidates() const { return alive_; }
  HPoint candidate(int idx) const { return packing_->centers[idx]; }
  const std::vector<CutRound>& rounds() const { return rounds_; }
  int round() const { return static_cast<int>(rounds_.size()); }

  /// Samples unit normals at x, keeps the one whose hyperplane meets the
  /// fewest eps r balls and the side keeping more candidates, then prunes.
  /// exhausted is set (and nothing pruned) when every sampled normal would
  /// eliminate all candidates.
  CutRespond respond(const HPoint& x);

  /// Half-space side and eps r clearance of c against every recorded round.
  bool consistent(const HPoint& c) const;

 private:
  CutConfig cfg_;
  double eps_;
  std::shared_ptr<const Packing> packing_;
  std::vector<int> alive_;
  std::vector<CutRound> rounds_;
  CounterRng rng_;
};

struct CutView {
  int d;
  double r;
  HPoint xref;
  const std::vector<CutRound>* rounds;
};

class CutPlayer {
 public:
  virtual ~CutPlayer() = default;
  virtual std::string name() const = 0;
  virtual HPoint next(const CutView& view) = 0;
};

/// "repeat-xref", "random-query" or "subgradient-walk"; DomainError otherwise.
std::unique_ptr<CutPlayer> make_cut_player(const std::string& name, std::uint64_t seed);

struct CutTranscript {
  std::string player;
  int d;
  double r;
  double eps;
  std::uint64_t seed;
  int initial_candidates;
  std::vector<CutRound> rounds;
  bool exhausted = false;
  int rounds_survived = 0;       // rounds answered before exhaustion or max_rounds
  int quarter_law_violations = 0;
  bool all_consistent = true;
  bool has_xstar = false;
  HPoint xstar;
  bool xstar_replay_ok = false;
  double target_rounds = 0.0;    // (d - 1) r / 32, reported only
};

/// Plays until the adversary is exhausted or max_rounds. x* is the first
/// surviving candidate and is replayed exactly against the full history.
CutTranscript play_game(const CutConfig& cfg, CutPlayer& player, std::shared_ptr<const Packing> packing = nullptr);

}  // namespace hgc
