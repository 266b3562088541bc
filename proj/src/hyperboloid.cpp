#include "hypergconv/hyperboloid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hypergconv/errors.hpp"

namespace hgc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_same(const Vec& u, const Vec& v) {
  if (u.size() != v.size() || u.size() < 2) {
    throw DimensionError("ambient vectors must have equal length >= 2 (got " + std::to_string(u.size()) + " and " +
                         std::to_string(v.size()) + ")");
  }
}

// Minkowski Gram-Schmidt step against an orthonormal family whose first
// member may be timelike. Applied twice for stability.
Vec orthogonalize(Vec w, const std::vector<Vec>& family) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vec& b : family) {
      const double bb = mink_inner(b, b);
      w -= (mink_inner(w, b) / bb) * b;
    }
  }
  return w;
}

double euclid_scale(const Vec& v) { return std::max(1.0, v.norm()); }

// Completes `family` (first member timelike) with standard basis directions,
// greedily taking the one with the largest residual. Returns the new members.
std::vector<Vec> complete_frame(const std::vector<Vec>& family, int count, int n) {
  std::vector<Vec> all = family;
  std::vector<Vec> added;
  for (int c = 0; c < count; ++c) {
    Vec best;
    double best_norm = -1.0;
    for (int i = 0; i < n; ++i) {
      Vec e = Vec::Zero(n);
      e[i] = 1.0;
      Vec w = orthogonalize(e, all);
      const double nn = mink_inner(w, w);
      if (nn > best_norm) {
        best_norm = nn;
        best = w;
      }
    }
    if (best_norm <= 0.0) throw GeometryError("failed to complete Minkowski frame");
    best /= std::sqrt(best_norm);
    all.push_back(best);
    added.push_back(best);
  }
  return added;
}

}  // namespace

double mink_inner(const Vec& u, const Vec& v) {
  check_same(u, v);
  return -u[0] * v[0] + u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

HPoint HPoint::from_coords(Vec c, double tol) {
  if (c.size() < 2) throw DimensionError("point needs at least 2 coordinates");
  if (!c.allFinite()) throw GeometryError("non-finite point coordinates");
  const double q = mink_inner(c, c);
  if (!(c[0] > 0.0) || std::abs(q + 1.0) > tol * std::max(1.0, c[0] * c[0])) {
    throw GeometryError("coordinates are not on the hyperboloid (<x,x> = " + std::to_string(q) + ")");
  }
  return HPoint(std::move(c));
}

HPoint HPoint::project(Vec c) {
  if (c.size() < 2) throw DimensionError("point needs at least 2 coordinates");
  const double q = -mink_inner(c, c);
  // -<c,c> cancels badly for large coordinates, so a vector already near the
  // sheet (up to that rounding noise) keeps its spatial part and gets x0
  // recomputed from it.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * c.squaredNorm();
  if (!(c[0] > 0.0) || !std::isfinite(q) || !(q > 0.0 || q - 1.0 >= -noise))
    throw GeometryError("cannot project a non-timelike vector");
  if (std::abs(q - 1.0) > std::max(1e-6, noise)) c /= std::sqrt(q);
  c[0] = std::sqrt(1.0 + c.tail(c.size() - 1).squaredNorm());
  return HPoint(std::move(c));
}

HPoint HPoint::lift(Vec c) {
  if (c.size() < 2) throw DimensionError("point needs at least 2 coordinates");
  if (!c.allFinite()) throw GeometryError("non-finite point coordinates");
  c[0] = std::sqrt(1.0 + c.tail(c.size() - 1).squaredNorm());
  return HPoint(std::move(c));
}

HPoint HPoint::origin(int d) {
  if (d < 1) throw DimensionError("dimension must be >= 1");
  Vec c = Vec::Zero(d + 1);
  c[0] = 1.0;
  return HPoint(std::move(c));
}

HTangent HTangent::make(const HPoint& base, Vec vec, double tol) {
  check_same(base.coords(), vec);
  const double ip = mink_inner(base.coords(), vec);
  if (std::abs(ip) > tol * std::max(1.0, base.coords().norm() * vec.norm())) {
    throw GeometryError("vector is not tangent at its base (<x,v> = " + std::to_string(ip) + ")");
  }
  return {base, std::move(vec)};
}

HTangent HTangent::project(const HPoint& base, Vec vec) {
  check_same(base.coords(), vec);
  vec += mink_inner(base.coords(), vec) * base.coords();
  return {base, std::move(vec)};
}

HTangent HTangent::zero(const HPoint& base) { return {base, Vec::Zero(base.coords().size())}; }

double HTangent::norm() const { return std::sqrt(std::max(0.0, mink_inner(vec, vec))); }

double HTangent::inner(const HTangent& o) const { return mink_inner(vec, o.vec); }

namespace {

// u - 1 where u = -<x,y> = cosh(dist). Near coincidence the difference form
// <x-y, x-y>/2 avoids cancellation in u - 1.
double cosh_minus_one(const HPoint& x, const HPoint& y) {
  const Vec& a = x.coords();
  const Vec& b = y.coords();
  const double u = -mink_inner(a, b);
  const double slack = 1e-8 + 64.0 * kEps * std::abs(a[0] * b[0]) * static_cast<double>(a.size());
  if (!(u >= 1.0 - slack)) {
    throw GeometryError("-<x,y> = " + std::to_string(u) + " < 1: inputs are not on the hyperboloid");
  }
  // The branch is chosen on the difference form: at large coordinates u
  // itself is rounding noise and cannot tell near from far.
  const Vec diff = a - b;
  const double w = 0.5 * mink_inner(diff, diff);
  if (w < 1.0) return std::max(0.0, w);
  return u - 1.0;
}

double acosh_one_plus(double w) {
  if (w < 1e-8) return std::sqrt(2.0 * w) * (1.0 - w / 12.0);
  return std::log1p(w + std::sqrt(w * (w + 2.0)));
}

}  // namespace

double dist(const HPoint& x, const HPoint& y) {
  check_same(x.coords(), y.coords());
  return acosh_one_plus(cosh_minus_one(x, y));
}

HPoint exp_map(const HTangent& v) { return exp_map(v.base, v.vec); }

HPoint exp_map(const HPoint& x, const Vec& v) {
  check_same(x.coords(), v);
  const double n = std::sqrt(std::max(0.0, mink_inner(v, v)));
  if (n > kRMax) throw RangeError("tangent norm " + std::to_string(n) + " exceeds R_MAX");
  if (n == 0.0) return x;
  Vec y = std::cosh(n) * x.coords() + (std::sinh(n) / n) * v;
  return HPoint::lift(std::move(y));
}

HTangent log_map(const HPoint& x, const HPoint& y) {
  check_same(x.coords(), y.coords());
  const double w = cosh_minus_one(x, y);
  const double d = acosh_one_plus(w);
  if (d == 0.0) return HTangent::zero(x);
  // y - cosh(d) x written as (y - x) - (cosh(d) - 1) x.
  Vec v = (y.coords() - x.coords()) - w * x.coords();
  const double scale = d < 1e-8 ? 1.0 : d / std::sinh(d);
  v *= scale;
  v += mink_inner(x.coords(), v) * x.coords();
  const double n = std::sqrt(std::max(0.0, mink_inner(v, v)));
  if (n > 0.0) v *= d / n;
  return {x, std::move(v)};
}

HTangent ptransport(const HPoint& x, const HPoint& y, const HTangent& u) {
  const HTangent v = log_map(x, y);
  const double n = v.norm();
  if (n == 0.0) return HTangent::project(y, u.vec);
  const Vec vhat = v.vec / n;
  const double c = mink_inner(u.vec, vhat);
  Vec out = u.vec - c * vhat + c * (std::sinh(n) * x.coords() + std::cosh(n) * vhat);
  return HTangent::project(y, std::move(out));
}

HPoint geodesic(const HPoint& x, const HPoint& y, double t) { return exp_map(log_map(x, y) * t); }

std::vector<HTangent> tangent_frame(const HPoint& x) {
  const int d = x.dim();
  const HPoint o = HPoint::origin(d);
  std::vector<HTangent> frame;
  frame.reserve(d);
  for (int i = 1; i <= d; ++i) {
    Vec e = Vec::Zero(d + 1);
    e[i] = 1.0;
    frame.push_back(ptransport(o, x, HTangent{o, e}));
  }
  return frame;
}

double zeta(double t) {
  if (!(t >= 0.0)) throw DomainError("zeta requires t >= 0");
  if (t < 1e-4) return 1.0 + t * t / 3.0 - t * t * t * t / 45.0;
  return t / std::tanh(t);
}

RightTriangle right_triangle(double r0, double theta) {
  if (!(theta > 0.0) || !(theta < std::numbers::pi / 2)) throw DomainError("theta must lie in (0, pi/2)");
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError("r0 must be finite and positive");
  return {std::atanh(std::cos(theta) * std::tanh(r0)), std::asinh(std::sin(theta) * std::sinh(r0))};
}

double TotallyGeodesicSub::residual(const Vec& x) const {
  double s = 0.0;
  for (const Vec& n : normals_) {
    const double c = mink_inner(x, n);
    s += c * c;
  }
  return std::sqrt(s);
}

TotallyGeodesicSub TotallyGeodesicSub::from_normals(const HPoint& anchor, const std::vector<Vec>& normals) {
  const int n = static_cast<int>(anchor.coords().size());
  std::vector<Vec> fam{anchor.coords()};
  std::vector<Vec> ortho;
  for (const Vec& v : normals) {
    Vec w = orthogonalize(v, fam);
    const double nn = mink_inner(w, w);
    if (!(nn > 1e-18 * euclid_scale(v) * euclid_scale(v))) throw GeometryError("degenerate normal family");
    w /= std::sqrt(nn);
    fam.push_back(w);
    ortho.push_back(w);
  }
  std::vector<Vec> basis{anchor.coords()};
  std::vector<Vec> rest = complete_frame(fam, n - 1 - static_cast<int>(ortho.size()), n);
  basis.insert(basis.end(), rest.begin(), rest.end());
  return TotallyGeodesicSub(std::move(basis), std::move(ortho));
}

TotallyGeodesicSub gspan(const std::vector<HPoint>& points, const std::vector<HTangent>& vectors) {
  if (points.empty()) throw DomainError("gspan needs at least one point");
  const int n = static_cast<int>(points[0].coords().size());
  std::vector<Vec> inputs;
  for (std::size_t i = 1; i < points.size(); ++i) inputs.push_back(points[i].coords());
  for (const HTangent& v : vectors) inputs.push_back(v.vec);
  std::vector<Vec> basis{points[0].coords()};
  for (const Vec& v : inputs) {
    if (v.size() != n) throw DimensionError("gspan inputs have inconsistent dimension");
    Vec w = orthogonalize(v, basis);
    const double nn = mink_inner(w, w);
    const double cut = std::max(1e-9, 1e-12 * v.norm());
    if (nn > cut * cut) {
      w /= std::sqrt(nn);
      basis.push_back(w);
    }
  }
  std::vector<Vec> normals = complete_frame(basis, n - static_cast<int>(basis.size()), n);
  return TotallyGeodesicSub(std::move(basis), std::move(normals));
}

HPoint sub_exp(const TotallyGeodesicSub& S, const Vec& t) {
  if (t.size() != S.dim()) throw DimensionError("sub_exp coordinate count must equal dim(S)");
  Vec v = Vec::Zero(S.basis()[0].size());
  for (int i = 0; i < S.dim(); ++i) v += t[i] * S.basis()[i + 1];
  return exp_map(HPoint::project(S.basis()[0]), v);
}

SubProjection sub_dist(const HPoint& x, const TotallyGeodesicSub& S) {
  Vec foot = x.coords();
  double s2 = 0.0;
  for (const Vec& n : S.normals()) {
    const double c = mink_inner(x.coords(), n);
    s2 += c * c;
    foot -= c * n;
  }
  if (s2 == 0.0) return {0.0, x};
  return {std::asinh(std::sqrt(s2)), HPoint::project(std::move(foot))};
}

HalfSpace::HalfSpace(const HPoint& anchor, const HTangent& normal) : anchor_(anchor) {
  HTangent n = HTangent::project(anchor, normal.vec);
  const double nn = n.norm();
  if (!(nn > 0.0)) throw GeometryError("halfspace normal must be nonzero");
  normal_ = n * (1.0 / nn);
  boundary_ = TotallyGeodesicSub::from_normals(anchor_, {normal_.vec});
}

double HalfSpace::margin(const HPoint& x) const {
  // <normal, log_anchor(x)> has the sign of <normal, x>; asinh gives the
  // signed distance to the boundary hyperplane.
  return std::asinh(mink_inner(normal_.vec, x.coords()));
}

double halfspace_dist(const HPoint& x, const HalfSpace& L) {
  const double m = L.margin(x);
  return m >= 0.0 ? 0.0 : -m;
}

}  // namespace hgc
