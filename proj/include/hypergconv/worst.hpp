#pragma once

#include <memory>
#include <vector>

#include "hypergconv/zoo.hpp"

namespace hgc {

/// Hard instance for subgradient methods on H^d built from a ladder of right
/// triangles: y_0 = e0, each y_{k+1} lies a distance delta_k from y_k along
/// e_{k+1}, and the spheres of radius r_k around y_k in
/// H_k = M ∩ span(y_k, e_{k+1}, ..., e_d) shrink to the two candidate
/// minimizers at level d-1.
struct WorstInstance {
  double eps;
  double theta;  // cos(theta) = 4 eps
  double r;
  int d;         // = T
  double M;      // Lipschitz constant 2 / cos(theta)
  std::vector<HPoint> y;                   // y_0 .. y_{d-1}
  std::vector<double> radii;               // r_0 .. r_{d-1}
  std::vector<double> deltas;              // delta_0 .. delta_{d-1}
  std::vector<std::vector<HTangent>> frames;  // frames[k][i-1] = e_i^{(k)}, i = 1..d
  HPoint xstar;
  std::vector<HalfSpace> halfspaces;       // L_0 .. L_{d-2}

  /// -(1/cos theta) e_{k+1}^{(k)}: the subgradient returned at y_k.
  HTangent g_tilde(int k) const;
};

/// Builds and verifies the instance; T = d = floor(zeta(r) / (32 eps^2)).
/// pick selects which of the two points of the final sphere is x*.
/// Throws DomainError if eps > 1/(4 sqrt 2) or d < 2, RangeError if r > R_MAX,
/// GeometryError if a ladder invariant fails by more than 1e-8.
WorstInstance worst_build(double eps, double r, int pick = +1);

/// floor(zeta(r) / (32 eps^2)).
int worst_dimension(double eps, double r);

enum class SubgradRule { Ladder, Region, Default };

struct WorstEval {
  OracleSample sample;
  SubgradRule rule;
  int level;    // smallest k with x in I_k = M ∩ span(e_0..e_k)
  bool a2_ok;   // x in L_l for all l < level
};

/// f(x) = dist(x, x*) + max_{i <= d-2} dist(x, L_i) / cos(theta), with the
/// subgradient choice that keeps subgradient descent inside the ladder.
class WorstOracle : public FnOracle {
 public:
  explicit WorstOracle(std::shared_ptr<const WorstInstance> inst);
  OracleSample eval(const HPoint& x) const override { return eval_flagged(x).sample; }
  double value(const HPoint& x) const override;
  WorstEval eval_flagged(const HPoint& x) const;
  const WorstInstance& instance() const { return *inst_; }

 private:
  HTangent default_subgrad(const HPoint& x) const;
  std::shared_ptr<const WorstInstance> inst_;
};

std::shared_ptr<const WorstOracle> worst_oracle(const WorstInstance& inst);

struct A2Row {
  int k;
  bool a1;
  double a1_residual;  // sinh of the distance from x_k to gspan of the history
  bool a2;
  double a2_margin;    // min_{l<k} signed distance of x_k into L_l (+inf if k = 0)
};

struct A2Report {
  std::vector<A2Row> rows;
  bool a1_all = true;
  bool a2_all = true;
};

/// Checks x_0 = e0 and x_k ∈ gspan(x_<k, g_<k) (residual 1e-7), and
/// x_k ∈ L_l for l < min(k, d-1) (margin -1e-9).
A2Report a2_check(const WorstInstance& inst, const std::vector<OracleSample>& trace);

struct GapBoundReport {
  double gap;
  double bound;
  bool holds;
};

/// f(xref) - f* <= (L r^2 / 2) (8 / zeta(r)), checked with 1e-6 slack.
GapBoundReport gap_bound_check(const FnOracle& f, const HPoint& xref, double r, double L, double fstar);

}  // namespace hgc
