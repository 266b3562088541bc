#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hypergconv/zoo.hpp"

namespace hgc {

struct InterpData {
  std::vector<OracleSample> items;
  double mu = 0.0;

  /// Throws DimensionError on mixed dimensions, DomainError on mu < 0 or a
  /// g_i not tangent at x_i.
  void validate() const;
};

struct NecessaryReport {
  bool pass = true;
  int worst_i = -1;
  int worst_j = -1;
  /// min over ordered pairs of F_j - F_i - <g_i, log_{x_i}(x_j)> - (mu/2) dist^2.
  double slack = 0.0;
};

/// All N^2 ordered pairs; pass iff slack >= -1e-9.
NecessaryReport check_necessary(const InterpData& data);

struct Interpolant {
  FnPtr f;
  double max_value_error = 0.0;   // max_i |f(x_i) - F_i|
  double min_subgrad_slack = 0.0; // min over samples of f(z) - F_i - <g_i, log_{x_i}(z)>
  bool verified = false;
};

struct NotApplicable {
  std::string reason;
};

/// max_i {F_i + <g_i, log_{x_i}(x)> + (mu/2) dist(x_i, x)^2}. Requires
/// |g_i| <= mu/2 and check_necessary to pass. Verification uses `samples`
/// random points around each x_i.
std::variant<Interpolant, NotApplicable> construct_sufficient(const InterpData& data, int samples = 100,
                                                              std::uint64_t seed = 0);

struct Obstruction {
  InterpData data;
  HPoint p;      // foot of the altitude from x_1
  double h;      // dist(x_1, p)
  double lower;  // 1 - h / cos(theta): value forced at p by g_1
  double upper;  // max(F_2, F_3) = 0: bound at p from convexity on [x_2, x_3]
  bool valid() const { return lower > upper; }
};

/// Isosceles triangle in H^2 with legs of length 1 from x_1 = e0 and apex
/// angle 2 theta; F = (1, 0, 0), g_1 = -(1/cos theta) log_{x_1}(p)/h. With
/// perpendicular set, g_2 and g_3 have length 1/sin(alpha) orthogonal to
/// [x_2, x_3] towards x_1 instead of zero. DomainError unless theta in (0, pi/2).
Obstruction obstruction_certificate(double theta, bool perpendicular = false);

struct MinimalFunction {
  FnPtr f;
  double value_at_x;
  double target;            // F + <g, log_y(x)>
  double value_at_y;
  double min_subgrad_slack; // sampled f(z) - F - <g, log_y(z)>
  bool certified;           // all three checks within 1e-8
};

/// Cheapest g-convex f with f(y) = F and g in ∂f(y) at x: a distance to a
/// point on the line through y and x plus |g_perp| dist(., line).
/// DomainError if x = y.
MinimalFunction minimal_function(double F, const HPoint& y, const HTangent& g, const HPoint& x, int samples = 100,
                                 std::uint64_t seed = 0);

/// (f(a) + f(b))/2 - (mu/8) dist(a,b)^2 - f(midpoint); non-negative for a
/// mu-strongly g-convex f.
double midpoint_slack(const FnOracle& f, const HPoint& a, const HPoint& b, double mu);

}  // namespace hgc
