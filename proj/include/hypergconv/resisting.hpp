#pragma once

#include <memory>
#include <vector>

#include "hypergconv/zoo.hpp"

namespace hgc {

/// Which h_i^s was committed to at one query, with its margins.
struct Selection {
  int i;              // frame direction, 1..d (ambient coordinate index)
  int s;              // +1 or -1
  double h;           // h_i^s(x_k) = dist(x_k, S_i^s) - a, >= 0 in theory
  double runner_up;   // h minus the best remaining alternative
  bool tied;          // argmax attained by more than one (i, s) within 1e-12
  bool value_tied;    // the shifted max at x_k was tied between parts
};

/// Finalized hard function with its certified minimizer.
struct GameFinal {
  FnPtr f;
  std::shared_ptr<const ShiftedMax> nonsmooth;  // f_{T-1}
  HPoint xstar;
  double fstar;
  std::vector<Selection> chosen;  // includes padding when fewer than T queries
};

/// Resisting oracle for nonsmooth g-convex 1-Lipschitz functions on H^T.
///
/// Hyperplanes S_i^s sit at distance a from x_ref = e0 along +-e_i with
/// tanh(a) = tanh(r)/sqrt(T); query k commits to the (i, s) with the largest
/// h_i^s(x_k) = dist(x_k, S_i^s) - a among unused directions and answers with
/// f_k = max_{l<=k} (h_l - l delta), delta = a/(2T).
class NonsmoothGame {
 public:
  NonsmoothGame(int T, double r);
  virtual ~NonsmoothGame() = default;

  int T() const { return T_; }
  int d() const { return T_; }
  double r() const { return r_; }
  double a() const { return a_; }
  double delta() const { return delta_; }
  const HPoint& xref() const { return xref_; }
  int queries() const { return static_cast<int>(history_.size()); }

  /// Throws StateError once T queries have been answered.
  virtual OracleSample respond(const HPoint& x);
  /// Pads unused directions (ascending i, s = +1) and builds x*.
  virtual GameFinal finalize() const;

  const std::vector<OracleSample>& history() const { return history_; }
  const std::vector<Selection>& selections() const { return chosen_; }
  /// f_k after the latest query.
  const std::shared_ptr<const ShiftedMax>& current() const { return fk_; }

  HPoint z(int i, int s) const;
  const TotallyGeodesicSub& sub(int i, int s) const;
  double h(int i, int s, const HPoint& x) const;

 protected:
  Selection select(const HPoint& x);
  std::shared_ptr<const ShiftedMax> build_max(const std::vector<Selection>& chosen) const;
  HPoint build_xstar(const std::vector<Selection>& chosen) const;
  std::vector<Selection> padded() const;

  int T_;
  double r_, a_, delta_;
  HPoint xref_;
  std::vector<TotallyGeodesicSub> subs_;  // index 2*(i-1) + (s<0)
  std::vector<bool> used_;
  std::vector<Selection> chosen_;
  std::vector<OracleSample> history_;
  std::shared_ptr<const ShiftedMax> fk_;
};

/// Same protocol, answering with the Moreau envelope of f_k at lambda = delta/4.
class SmoothGame : public NonsmoothGame {
 public:
  SmoothGame(int T, double r, double prox_tol = 1e-12);

  double lambda() const { return lambda_; }
  /// 1/tanh(lambda).
  double L() const;

  OracleSample respond(const HPoint& x) override;
  GameFinal finalize() const override;

  /// Nonsmooth answers f_k(x_k) for the same queries.
  const std::vector<OracleSample>& nonsmooth_history() const { return twin_; }
  MoreauParams moreau_params() const { return {lambda_, prox_tol_, 10000}; }

 private:
  double lambda_;
  double prox_tol_;
  std::vector<OracleSample> twin_;
};

/// Presents a game as an ordinary oracle: the first T evaluations are
/// answered by the game; later ones by the frozen final function. Not safe for
/// concurrent use.
class GameOracle : public FnOracle {
 public:
  explicit GameOracle(std::shared_ptr<NonsmoothGame> game);
  OracleSample eval(const HPoint& x) const override;
  const NonsmoothGame& game() const { return *game_; }

 private:
  std::shared_ptr<NonsmoothGame> game_;
  mutable std::shared_ptr<const GameFinal> frozen_;
};

struct GameCertificate {
  double dist_xref_xstar;
  double f_xstar;
  double fstar;
  double max_sub_dist;      // max_k dist(x*, S_{i_k}^{s_k})
  double max_cosh_residual; // max_k |cosh(dist(x*, z_k)) - cosh(r)/cosh(a)|
  double min_h;             // min_k h_{i_k}^{s_k}(x_k)
  double max_replay_error;  // max_k |f(x_k) - F_k|
  std::vector<double> gaps; // f(x_k) - f*
  double bound;             // theoretical lower bound on every gap
  double min_gap;
};

/// Evaluates the finalized function on the game history and collects the
/// certificate quantities. `bound` is the gap bound to record.
GameCertificate certify(const NonsmoothGame& game, const GameFinal& fin,
                        const std::vector<OracleSample>& history, double bound);

/// r / (2 zeta(r) sqrt(T)).
double nonsmooth_gap_bound(double r, int T);
/// L r^2 / (2 T^2) / (8 zeta(r)^2).
double smooth_gap_bound(double L, double r, int T);

}  // namespace hgc
