#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hgc {

using Vec = Eigen::VectorXd;

/// Largest tangent norm accepted by exp_map; cosh(30) ~ 5e12 still leaves
/// about four significant digits in the coordinates.
constexpr double kRMax = 30.0;

/// -u0 v0 + sum_{i>=1} ui vi. Throws DimensionError on mismatched or short inputs.
double mink_inner(const Vec& u, const Vec& v);

/// Point on the upper sheet {<x,x> = -1, x0 > 0} of R^{d,1}.
class HPoint {
 public:
  HPoint() = default;

  /// Validates the sheet invariant: |<x,x> + 1| <= tol * max(1, x0^2).
  static HPoint from_coords(Vec c, double tol = 1e-10);
  /// Rescales a future-pointing timelike vector onto the sheet.
  static HPoint project(Vec c);
  /// Keeps the spatial part and solves x0 from the sheet equation. For
  /// vectors that are on the sheet up to rounding.
  static HPoint lift(Vec c);
  /// e0 in H^d.
  static HPoint origin(int d);

  const Vec& coords() const { return c_; }
  int dim() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int i) const { return c_[i]; }

 private:
  explicit HPoint(Vec c) : c_(std::move(c)) {}
  Vec c_;
};

/// Tangent vector at `base`: <base, vec> = 0.
struct HTangent {
  HPoint base;
  Vec vec;

  /// Validates |<base, vec>| <= tol * max(1, |base| |vec|).
  static HTangent make(const HPoint& base, Vec vec, double tol = 1e-10);
  /// Removes the normal component: vec + <base, vec> base.
  static HTangent project(const HPoint& base, Vec vec);
  static HTangent zero(const HPoint& base);

  double norm() const;
  double inner(const HTangent& o) const;
  HTangent operator*(double s) const { return {base, vec * s}; }
  HTangent operator+(const HTangent& o) const { return {base, vec + o.vec}; }
  HTangent operator-(const HTangent& o) const { return {base, vec - o.vec}; }
  HTangent operator-() const { return {base, -vec}; }
};

double dist(const HPoint& x, const HPoint& y);
/// cosh(|v|) x + sinh(|v|)/|v| v, lifted back onto the sheet. Throws RangeError if |v| > kRMax.
HPoint exp_map(const HTangent& v);
HPoint exp_map(const HPoint& x, const Vec& v);
HTangent log_map(const HPoint& x, const HPoint& y);
/// Parallel transport along the geodesic from x to y.
HTangent ptransport(const HPoint& x, const HPoint& y, const HTangent& u);
/// Point at fraction t along the geodesic from x to y.
HPoint geodesic(const HPoint& x, const HPoint& y, double t);

/// Orthonormal basis of T_x M: e_1..e_d transported from the origin.
std::vector<HTangent> tangent_frame(const HPoint& x);

/// t / tanh(t), with zeta(0) = 1. Throws DomainError for t < 0.
double zeta(double t);

struct RightTriangle {
  double delta;  // leg adjacent to theta: tanh(delta) = cos(theta) tanh(r0)
  double r1;     // opposite leg: sinh(r1) = sin(theta) sinh(r0)
};
/// Right triangle with hypotenuse r0 and angle theta in (0, pi/2).
RightTriangle right_triangle(double r0, double theta);

/// S = M ∩ P for a linear subspace P of R^{d,1} containing a timelike vector.
class TotallyGeodesicSub {
 public:
  TotallyGeodesicSub() = default;
  TotallyGeodesicSub(std::vector<Vec> basis, std::vector<Vec> normals)
      : basis_(std::move(basis)), normals_(std::move(normals)) {}

  /// Hyperplane-type sub through `anchor` whose Minkowski orthocomplement is
  /// spanned by the given tangent vectors at the anchor.
  static TotallyGeodesicSub from_normals(const HPoint& anchor, const std::vector<Vec>& normals);

  /// basis[0] is a point of S; the rest are spacelike and orthonormal.
  const std::vector<Vec>& basis() const { return basis_; }
  /// Spacelike unit normals spanning P-perp.
  const std::vector<Vec>& normals() const { return normals_; }
  int dim() const { return static_cast<int>(basis_.size()) - 1; }
  int ambient_dim() const { return basis_.empty() ? 0 : static_cast<int>(basis_[0].size()) - 1; }

  /// sqrt(sum_j <x, n_j>^2) = sinh(dist(x, S)).
  double residual(const Vec& x) const;

 private:
  std::vector<Vec> basis_;
  std::vector<Vec> normals_;
};

/// Smallest totally geodesic submanifold through `points`, tangent to `vectors`.
TotallyGeodesicSub gspan(const std::vector<HPoint>& points, const std::vector<HTangent>& vectors);

/// exp_{basis[0]}(sum_i t_i basis[i+1]); t has length S.dim().
HPoint sub_exp(const TotallyGeodesicSub& S, const Vec& t);

struct SubProjection {
  double dist;
  HPoint foot;
};
SubProjection sub_dist(const HPoint& x, const TotallyGeodesicSub& S);

/// exp_anchor({v : <normal, v> >= 0}).
class HalfSpace {
 public:
  HalfSpace() = default;
  /// Normalizes `normal`; throws GeometryError on a zero normal.
  HalfSpace(const HPoint& anchor, const HTangent& normal);

  const HPoint& anchor() const { return anchor_; }
  const HTangent& normal() const { return normal_; }
  const TotallyGeodesicSub& boundary() const { return boundary_; }

  /// Signed distance to the boundary, positive inside.
  double margin(const HPoint& x) const;
  bool contains(const HPoint& x, double tol = 1e-9) const { return margin(x) >= -tol; }

 private:
  HPoint anchor_;
  HTangent normal_;
  TotallyGeodesicSub boundary_;
};

double halfspace_dist(const HPoint& x, const HalfSpace& L);

}  // namespace hgc
