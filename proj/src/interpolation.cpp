#include "hypergconv/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hypergconv/errors.hpp"
#include "hypergconv/rng.hpp"

namespace hgc {

namespace {

/// Point at distance up to `radius` from x in a uniformly random direction.
HPoint random_near(CounterRng& rng, const HPoint& x, double radius) {
  const int d = x.dim();
  Vec z = Vec::Zero(d + 1);
  for (int i = 1; i <= d; ++i) z[i] = rng.normal();
  const HPoint o = HPoint::origin(d);
  HTangent v = ptransport(o, x, HTangent{o, z});
  const double n = v.norm();
  if (n == 0.0) return x;
  return exp_map(v * (radius * rng.uniform() / n));
}

}  // namespace

void InterpData::validate() const {
  if (mu < 0.0) throw DomainError("mu must be non-negative");
  if (items.empty()) return;
  const int d = items.front().x.dim();
  for (const OracleSample& s : items) {
    if (s.x.dim() != d || s.g.vec.size() != d + 1) throw DimensionError("interpolation data mixes dimensions");
    const double off = std::abs(mink_inner(s.x.coords(), s.g.vec));
    if (off > 1e-9 * std::max(1.0, s.x.coords().norm() * s.g.vec.norm()))
      throw DomainError("g_i is not tangent at x_i");
  }
}

NecessaryReport check_necessary(const InterpData& data) {
  data.validate();
  NecessaryReport rep;
  rep.slack = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(data.items.size());
  for (int i = 0; i < n; ++i) {
    const OracleSample& a = data.items[i];
    for (int j = 0; j < n; ++j) {
      const OracleSample& b = data.items[j];
      double s = 0.0;
      if (i != j) {
        const HTangent l = log_map(a.x, b.x);
        const double D = l.norm();
        s = b.F - a.F - HTangent{a.x, a.g.vec}.inner(l) - 0.5 * data.mu * D * D;
      }
      if (s < rep.slack) {
        rep.slack = s;
        rep.worst_i = i;
        rep.worst_j = j;
      }
    }
  }
  if (n == 0) rep.slack = 0.0;
  rep.pass = rep.slack >= -1e-9;
  return rep;
}

std::variant<Interpolant, NotApplicable> construct_sufficient(const InterpData& data, int samples, std::uint64_t seed) {
  data.validate();
  if (data.items.empty()) return NotApplicable{"no data"};
  for (std::size_t i = 0; i < data.items.size(); ++i) {
    if (data.items[i].g.norm() > 0.5 * data.mu * (1.0 + 1e-12))
      return NotApplicable{"|g_" + std::to_string(i) + "| exceeds mu/2"};
  }
  const NecessaryReport nec = check_necessary(data);
  if (!nec.pass) return NotApplicable{"necessary conditions fail"};

  std::vector<std::pair<FnPtr, double>> parts;
  for (const OracleSample& s : data.items) {
    FnPtr piece = fn_affine_sum(s.F, {{1.0, fn_pseudo_affine(HTangent{s.x, s.g.vec})}, {data.mu, fn_sqdist_point(s.x)}});
    parts.emplace_back(std::move(piece), 0.0);
  }
  Interpolant out;
  out.f = fn_shifted_max(std::move(parts));
  out.min_subgrad_slack = std::numeric_limits<double>::infinity();
  CounterRng rng(seed, 0x696e7470ull);
  for (const OracleSample& s : data.items) {
    out.max_value_error = std::max(out.max_value_error, std::abs(out.f->value(s.x) - s.F));
    for (int k = 0; k < samples; ++k) {
      const HPoint z = random_near(rng, s.x, 2.0);
      const double lin = s.F + HTangent{s.x, s.g.vec}.inner(log_map(s.x, z));
      out.min_subgrad_slack = std::min(out.min_subgrad_slack, out.f->value(z) - lin);
    }
  }
  out.verified = out.max_value_error <= 1e-9 && out.min_subgrad_slack >= -1e-9;
  return out;
}

Obstruction obstruction_certificate(double theta, bool perpendicular) {
  if (!(theta > 0.0) || !(theta < std::numbers::pi / 2)) throw DomainError("theta must lie in (0, pi/2)");
  const HPoint x1 = HPoint::origin(2);
  Vec v2(3), v3(3);
  v2 << 0.0, std::cos(theta), std::sin(theta);
  v3 << 0.0, std::cos(theta), -std::sin(theta);
  const HPoint x2 = exp_map(x1, v2);
  const HPoint x3 = exp_map(x1, v3);

  Obstruction ob;
  ob.p = geodesic(x2, x3, 0.5);
  const HTangent to_p = log_map(x1, ob.p);
  ob.h = to_p.norm();
  const HTangent g1 = to_p * (-1.0 / (std::cos(theta) * ob.h));
  ob.lower = 1.0 - ob.h / std::cos(theta);
  ob.upper = 0.0;

  HTangent g2 = HTangent::zero(x2);
  HTangent g3 = HTangent::zero(x3);
  if (perpendicular) {
    auto perp = [](const HPoint& a, const HPoint& b, const HPoint& apex) {
      const HTangent t = log_map(a, b);
      const HTangent tu = t * (1.0 / t.norm());
      const HTangent l = log_map(a, apex);
      const HTangent lp = l - tu * l.inner(tu);
      const double sin_alpha = lp.norm() / l.norm();
      return lp * (1.0 / (lp.norm() * sin_alpha));
    };
    g2 = perp(x2, x3, x1);
    g3 = perp(x3, x2, x1);
  }
  ob.data.mu = 0.0;
  ob.data.items = {{1.0, x1, g1}, {0.0, x2, g2}, {0.0, x3, g3}};
  return ob;
}

MinimalFunction minimal_function(double F, const HPoint& y, const HTangent& g, const HPoint& x, int samples,
                                 std::uint64_t seed) {
  if (x.dim() != y.dim() || g.vec.size() != y.coords().size()) throw DimensionError("minimal_function dimension mismatch");
  const HTangent l = log_map(y, x);
  const double D = l.norm();
  if (!(D > 0.0)) throw DomainError("minimal_function needs x != y");
  const HTangent gy{y, g.vec};
  const double ip = gy.inner(l);
  const HTangent g_par = l * (ip / (D * D));
  const HTangent g_perp = gy - g_par;
  const double a = g_par.norm();
  const double b = g_perp.norm();

  const HPoint xp = ip > 0.0 ? exp_map(l * -1.0) : x;
  std::vector<std::pair<double, FnPtr>> terms;
  if (a > 0.0) terms.emplace_back(a, fn_dist_point(xp));
  if (b > 0.0) terms.emplace_back(b, fn_dist_sub(gspan({y, x}, {}), 0.0));
  MinimalFunction out;
  out.f = fn_affine_sum(F - a * dist(xp, y), std::move(terms));
  out.value_at_x = out.f->value(x);
  out.target = F + ip;
  out.value_at_y = out.f->value(y);

  out.min_subgrad_slack = std::numeric_limits<double>::infinity();
  CounterRng rng(seed, 0x6d696e66ull);
  for (int k = 0; k < samples; ++k) {
    const HPoint z = random_near(rng, y, 2.0 * D + 1.0);
    out.min_subgrad_slack = std::min(out.min_subgrad_slack, out.f->value(z) - F - gy.inner(log_map(y, z)));
  }
  const double scale = std::max(1.0, std::abs(F) + g.norm() * D);
  out.certified = std::abs(out.value_at_x - out.target) <= 1e-8 * scale && std::abs(out.value_at_y - F) <= 1e-8 * scale &&
                  out.min_subgrad_slack >= -1e-8 * scale;
  return out;
}

double midpoint_slack(const FnOracle& f, const HPoint& a, const HPoint& b, double mu) {
  const double D = dist(a, b);
  return 0.5 * (f.value(a) + f.value(b)) - mu * D * D / 8.0 - f.value(geodesic(a, b, 0.5));
}

}  // namespace hgc
