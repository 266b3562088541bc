#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hypergconv/errors.hpp"
#include "hypergconv/worst.hpp"

namespace hgc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw GeometryError("worst instance invariant failed: " + what);
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

int worst_dimension(double eps, double r) { return static_cast<int>(std::floor(zeta(r) / (32.0 * eps * eps))); }

HTangent WorstInstance::g_tilde(int k) const { return frames.at(k).at(k) * (-1.0 / std::cos(theta)); }

WorstInstance worst_build(double eps, double r, int pick) {
  if (!(eps > 0.0) || eps > 1.0 / (4.0 * std::sqrt(2.0))) throw DomainError("eps must lie in (0, 1/(4 sqrt 2)]");
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  if (r > kRMax) throw RangeError("radius exceeds R_MAX");
  if (pick != 1 && pick != -1) throw DomainError("pick must be +1 or -1");
  const int d = worst_dimension(eps, r);
  if (d < 2) throw DomainError("eps too large for this radius: dimension " + std::to_string(d) + " < 2");

  WorstInstance w;
  w.eps = eps;
  w.r = r;
  w.d = d;
  w.theta = std::acos(4.0 * eps);
  w.M = 2.0 / (4.0 * eps);
  const double cos_t = std::cos(w.theta);

  w.y.push_back(HPoint::origin(d));
  w.radii.push_back(r);
  std::vector<HTangent> frame;
  for (int i = 1; i <= d; ++i) {
    Vec e = Vec::Zero(d + 1);
    e[i] = 1.0;
    frame.push_back({w.y[0], e});
  }
  w.frames.push_back(frame);

  // Step k moves along the plane span(y_k, E_{k+1}). Transport along it fixes
  // every frame vector orthogonal to that plane, so e_j^(k) = e_j^(j) for
  // j <= k and e_i^(k) = E_i for i > k. Everything is written in closed form
  // to avoid compounding transport error at large radii.
  for (int k = 0; k < d; ++k) {
    const RightTriangle tri = right_triangle(w.radii[k], w.theta);
    w.deltas.push_back(tri.delta);
    if (k == d - 1) break;
    w.radii.push_back(tri.r1);
    const Vec& yk = w.y[k].coords();
    Vec next = std::cosh(tri.delta) * yk;
    next[k + 1] += std::sinh(tri.delta);
    HPoint yn = HPoint::project(next);
    Vec ek = std::sinh(tri.delta) * yk;
    ek[k + 1] += std::cosh(tri.delta);
    std::vector<HTangent> nf;
    nf.reserve(d);
    for (int i = 0; i < d; ++i) {
      nf.push_back({yn, i == k ? ek : w.frames[k][i].vec});
    }
    w.y.push_back(std::move(yn));
    w.frames.push_back(std::move(nf));
  }

  const int last = d - 1;
  Vec xs = std::cosh(w.radii[last]) * w.y[last].coords() + pick * std::sinh(w.radii[last]) * w.frames[last][last].vec;
  w.xstar = HPoint::project(std::move(xs));

  for (int k = 0; k + 1 < d; ++k) {
    const HTangent u = log_map(w.y[k], w.xstar);
    HTangent V = w.frames[k][k] * (1.0 / cos_t) - u * (1.0 / u.norm());
    w.halfspaces.emplace_back(w.y[k], V);
  }

  // Verification of the ladder geometry.
  for (int k = 0; k < d; ++k) {
    const double rk = w.radii[k];
    require(rk >= r / 2.0 - 1e-12, "r_k >= r/2 at k=" + std::to_string(k));
    if (k + 1 < d) {
      const double rn = w.radii[k + 1];
      const double dk = w.deltas[k];
      require(close_rel(std::cosh(rk), std::cosh(rn) * std::cosh(dk), 1e-9), "cosh identity at k=" + std::to_string(k));
      require(close_rel(std::tanh(dk), cos_t * std::tanh(rk), 1e-9), "tanh identity at k=" + std::to_string(k));
      require(close_rel(std::sinh(rn), std::sin(w.theta) * std::sinh(rk), 1e-9), "sinh identity at k=" + std::to_string(k));
    }
    const HPoint& yk = w.y[k];
    for (int j = k + 1; j <= d; ++j)
      require(std::abs(yk[j]) <= 1e-12 * std::max(1.0, yk.coords().norm()), "y_k in I_k");
    for (int i = 0; i < d; ++i) {
      const HTangent& ei = w.frames[k][i];
      require(std::abs(mink_inner(ei.vec, yk.coords())) <= 1e-9 * std::max(1.0, yk.coords().norm()), "frame tangent");
      for (int j = 0; j <= i; ++j) {
        const double want = i == j ? 1.0 : 0.0;
        require(std::abs(ei.inner(w.frames[k][j]) - want) <= 1e-9, "frame orthonormal at k=" + std::to_string(k));
      }
      if (i + 1 >= k + 1) {
        Vec e = Vec::Zero(d + 1);
        e[i + 1] = 1.0;
        require((ei.vec - e).cwiseAbs().maxCoeff() <= 1e-9, "e_i^(k) = e_i for i >= k+1");
      }
    }
    const HTangent u = log_map(yk, w.xstar);
    require(close_rel(u.norm(), rk, 1e-9), "dist(y_k, x*) = r_k at k=" + std::to_string(k));
    for (int i = 0; i < k; ++i)
      require(std::abs(u.inner(w.frames[k][i])) <= 1e-8 * std::max(1.0, rk), "log_{y_k}(x*) orthogonal to I_k");
  }
  for (int k = 0; k + 1 < d; ++k) {
    // <n, x*> carries rounding of order eps |x*|.
    const double m = w.halfspaces[k].margin(w.xstar);
    require(std::abs(m) <= 1e-9 + 256.0 * std::numeric_limits<double>::epsilon() * w.xstar.coords().norm(),
            "x* on the boundary of L_k at k=" + std::to_string(k) + " (margin " + std::to_string(m) + ")");
  }
  return w;
}

WorstOracle::WorstOracle(std::shared_ptr<const WorstInstance> inst) : inst_(std::move(inst)) {
  meta_.name = "worst_function";
  meta_.lipschitz = inst_->M;
  meta_.minimizer = inst_->xstar;
  meta_.minimum = 0.0;
}

double WorstOracle::value(const HPoint& x) const {
  double worst = 0.0;
  for (const HalfSpace& L : inst_->halfspaces) worst = std::max(worst, halfspace_dist(x, L));
  return dist(x, inst_->xstar) + worst / std::cos(inst_->theta);
}

HTangent WorstOracle::default_subgrad(const HPoint& x) const {
  HTangent g = HTangent::zero(x);
  const HTangent u = log_map(x, inst_->xstar);
  const double du = u.norm();
  if (du > 1e-12) g = g - u * (1.0 / du);
  int arg = -1;
  double worst = 0.0;
  for (std::size_t i = 0; i < inst_->halfspaces.size(); ++i) {
    const double v = halfspace_dist(x, inst_->halfspaces[i]);
    if (v > worst) {
      worst = v;
      arg = static_cast<int>(i);
    }
  }
  if (arg >= 0) {
    const Vec& n = inst_->halfspaces[arg].normal().vec;
    const double c = mink_inner(x.coords(), n);
    // dist = -asinh(<x, n>) outside the half-space.
    HTangent gs = HTangent::project(x, n / std::sqrt(1.0 + c * c));
    g = g - gs * (1.0 / std::cos(inst_->theta));
  }
  return g;
}

WorstEval WorstOracle::eval_flagged(const HPoint& x) const {
  const WorstInstance& w = *inst_;
  const int d = w.d;
  const double tol = 1e-9 * std::max(1.0, x.coords().cwiseAbs().maxCoeff());
  int level = 0;
  for (int j = d; j >= 1; --j) {
    if (std::abs(x[j]) > tol) {
      level = j;
      break;
    }
  }
  bool a2 = true;
  for (int l = 0; l < std::min(level, d - 1); ++l) a2 = a2 && w.halfspaces[l].contains(x, 1e-9);

  const double F = value(x);
  // y_k is matched coordinatewise relative to its size; dist() at large
  // coordinates carries rounding above any fixed absolute tolerance.
  const auto at_ladder = [&](int k) {
    const Vec& yk = w.y[k].coords();
    return (x.coords() - yk).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, yk.cwiseAbs().maxCoeff());
  };
  if (level <= d - 1 && a2 && at_ladder(level))
    return {{F, x, HTangent::project(x, w.g_tilde(level).vec)}, SubgradRule::Ladder, level, true};
  if (level <= d - 2 && a2) {
    const double cos_t = std::cos(w.theta);
    const HTangent to_next = log_map(x, w.y[level + 1]);
    const HTangent to_star = log_map(x, w.xstar);
    const double ds = to_star.norm();
    const double ct = std::clamp(to_next.inner(to_star) / (to_next.norm() * ds), -1.0, 1.0);
    const double st = std::sqrt((1.0 - ct) * (1.0 + ct));
    const HTangent nk = ptransport(w.y[level], x, w.halfspaces[level].normal());
    const HTangent g = nk * (-st / cos_t) - to_star * (1.0 / ds);
    return {{F, x, g}, SubgradRule::Region, level, true};
  }
  return {{F, x, default_subgrad(x)}, SubgradRule::Default, level, a2};
}

std::shared_ptr<const WorstOracle> worst_oracle(const WorstInstance& inst) {
  return std::make_shared<WorstOracle>(std::make_shared<const WorstInstance>(inst));
}

A2Report a2_check(const WorstInstance& inst, const std::vector<OracleSample>& trace) {
  A2Report rep;
  std::vector<HPoint> pts;
  std::vector<HTangent> vecs;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const HPoint& x = trace[k].x;
    A2Row row{static_cast<int>(k), true, 0.0, true, std::numeric_limits<double>::infinity()};
    if (k == 0) {
      row.a1_residual = std::sinh(dist(x, HPoint::origin(inst.d)));
    } else {
      row.a1_residual = gspan(pts, vecs).residual(x.coords());
    }
    row.a1 = row.a1_residual <= 1e-7;
    const int lim = std::min<int>(static_cast<int>(k), inst.d - 1);
    for (int l = 0; l < lim; ++l) row.a2_margin = std::min(row.a2_margin, inst.halfspaces[l].margin(x));
    row.a2 = row.a2_margin >= -1e-9;
    rep.a1_all = rep.a1_all && row.a1;
    rep.a2_all = rep.a2_all && row.a2;
    rep.rows.push_back(row);
    pts.push_back(x);
    vecs.push_back(trace[k].g);
  }
  return rep;
}

GapBoundReport gap_bound_check(const FnOracle& f, const HPoint& xref, double r, double L, double fstar) {
  const double gap = f.value(xref) - fstar;
  const double bound = 0.5 * L * r * r * (8.0 / zeta(r));
  return {gap, bound, gap <= bound + 1e-6};
}

}  // namespace hgc
