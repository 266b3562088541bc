#include "hypergconv/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypergconv/errors.hpp"

namespace hgc {

std::vector<Piece> FnOracle::pieces(const HPoint& x) const {
  OracleSample s = eval(x);
  return {{s.F, std::move(s.g.vec)}};
}

namespace {

// Below this distance a point is treated as the kink itself.
constexpr double kKinkDist = 1e-12;

class DistPoint : public FnOracle {
 public:
  explicit DistPoint(const HPoint& z) : z_(z) {
    meta_.name = "dist_point";
    meta_.lipschitz = 1.0;
    meta_.minimizer = z;
    meta_.minimum = 0.0;
  }
  OracleSample eval(const HPoint& x) const override {
    HTangent v = log_map(x, z_);
    const double d = v.norm();
    if (d < kKinkDist) return {d, x, HTangent::zero(x)};
    return {d, x, v * (-1.0 / d)};
  }
  double value(const HPoint& x) const override { return dist(x, z_); }
  std::vector<HPoint> kinks() const override { return {z_}; }

 private:
  HPoint z_;
};

class SqDistPoint : public FnOracle {
 public:
  explicit SqDistPoint(const HPoint& z) : z_(z) {
    meta_.name = "sqdist_point";
    meta_.strong_convexity = 1.0;
    meta_.minimizer = z;
    meta_.minimum = 0.0;
  }
  OracleSample eval(const HPoint& x) const override {
    HTangent v = log_map(x, z_);
    const double d = v.norm();
    return {0.5 * d * d, x, -v};
  }
  double value(const HPoint& x) const override {
    const double d = dist(x, z_);
    return 0.5 * d * d;
  }

 private:
  HPoint z_;
};

class DistSub : public FnOracle {
 public:
  DistSub(const TotallyGeodesicSub& S, double shift) : S_(S), shift_(shift) {
    meta_.name = "dist_sub";
    meta_.lipschitz = 1.0;
    meta_.minimum = -shift;
  }

  OracleSample eval(const HPoint& x) const override {
    const double s = S_.residual(x.coords());
    if (s < on_sub_tol(x)) return {std::asinh(s) - shift_, x, HTangent::zero(x)};
    return {std::asinh(s) - shift_, x, grad(x, s)};
  }
  double value(const HPoint& x) const override { return std::asinh(S_.residual(x.coords())) - shift_; }

  std::vector<Piece> pieces(const HPoint& x) const override {
    if (S_.normals().size() != 1) return FnOracle::pieces(x);
    // Hyperplane: dist = max(sigma, -sigma) with sigma = asinh(<x, n>) smooth.
    const Vec& n = S_.normals()[0];
    const double c = mink_inner(x.coords(), n);
    const double sigma = std::asinh(c);
    Vec h = n / std::sqrt(1.0 + c * c);
    h += mink_inner(x.coords(), h) * x.coords();
    return {{sigma - shift_, h}, {-sigma - shift_, -h}};
  }

 private:
  static double on_sub_tol(const HPoint& x) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x.coords().norm()); }

  // Riemannian gradient of asinh(sqrt(sum_j <x,n_j>^2)): unit, pointing away
  // from the foot of the perpendicular.
  HTangent grad(const HPoint& x, double s) const {
    Vec h = Vec::Zero(x.coords().size());
    for (const Vec& n : S_.normals()) h += mink_inner(x.coords(), n) * n;
    h /= s * std::sqrt(1.0 + s * s);
    return HTangent::project(x, std::move(h));
  }

  TotallyGeodesicSub S_;
  double shift_;
};

class AffineSum : public FnOracle {
 public:
  AffineSum(double c, std::vector<std::pair<double, FnPtr>> terms) : c_(c), terms_(std::move(terms)) {
    meta_.name = "affine_sum";
    bool convex = true;
    double lip = 0.0;
    bool lip_known = true;
    for (const auto& [w, f] : terms_) {
      convex = convex && w >= 0.0 && f->meta().gconvex;
      if (f->meta().lipschitz) {
        lip += std::abs(w) * *f->meta().lipschitz;
      } else if (w != 0.0) {
        lip_known = false;
      }
    }
    meta_.gconvex = convex;
    if (lip_known) meta_.lipschitz = lip;
  }

  OracleSample eval(const HPoint& x) const override {
    OracleSample out{c_, x, HTangent::zero(x)};
    for (const auto& [w, f] : terms_) {
      if (w == 0.0) continue;
      OracleSample s = f->eval(x);
      out.F += w * s.F;
      out.g.vec += w * s.g.vec;
    }
    return out;
  }
  double value(const HPoint& x) const override {
    double v = c_;
    for (const auto& [w, f] : terms_)
      if (w != 0.0) v += w * f->value(x);
    return v;
  }
  std::vector<HPoint> kinks() const override {
    std::vector<HPoint> k;
    for (const auto& [w, f] : terms_) {
      auto fk = f->kinks();
      k.insert(k.end(), fk.begin(), fk.end());
    }
    return k;
  }

 private:
  double c_;
  std::vector<std::pair<double, FnPtr>> terms_;
};

class PseudoAffine : public FnOracle {
 public:
  explicit PseudoAffine(const HTangent& g) : g_(g) {
    const double n = g.norm();
    meta_.name = "pseudo_affine";
    meta_.lipschitz = n;
    meta_.smoothness = n;
    meta_.gconvex = false;
  }

  OracleSample eval(const HPoint& x) const override {
    const HPoint& y = g_.base;
    const HTangent s = log_map(y, x);
    const double n = s.norm();
    const double F = g_.inner(s);
    if (n == 0.0) return {F, x, HTangent::project(x, g_.vec)};
    // Adjoint of the inverse differential of exp_y at s: transport g to x, keep
    // the component along the geodesic, scale the rest by n / sinh(n).
    HTangent pg = ptransport(y, x, g_);
    HTangent e = log_map(x, y) * (-1.0 / n);
    const double c = pg.inner(e);
    HTangent par = e * c;
    HTangent perp = pg - par;
    return {F, x, par + perp * (n / std::sinh(n))};
  }
  double value(const HPoint& x) const override { return g_.inner(log_map(g_.base, x)); }

 private:
  HTangent g_;
};

}  // namespace

FnPtr fn_dist_point(const HPoint& z) { return std::make_shared<DistPoint>(z); }
FnPtr fn_sqdist_point(const HPoint& z) { return std::make_shared<SqDistPoint>(z); }
FnPtr fn_dist_sub(const TotallyGeodesicSub& S, double shift) { return std::make_shared<DistSub>(S, shift); }
FnPtr fn_affine_sum(double constant, std::vector<std::pair<double, FnPtr>> terms) {
  return std::make_shared<AffineSum>(constant, std::move(terms));
}
FnPtr fn_pseudo_affine(const HTangent& g) { return std::make_shared<PseudoAffine>(g); }

ShiftedMax::ShiftedMax(std::vector<std::pair<FnPtr, double>> parts, double tie_tol)
    : parts_(std::move(parts)), tie_tol_(tie_tol) {
  if (parts_.empty()) throw DomainError("shifted max needs at least one part");
  meta_.name = "shifted_max";
  bool convex = true;
  double lip = 0.0;
  bool lip_known = true;
  for (const auto& [f, off] : parts_) {
    convex = convex && f->meta().gconvex;
    if (f->meta().lipschitz) {
      lip = std::max(lip, *f->meta().lipschitz);
    } else {
      lip_known = false;
    }
  }
  meta_.gconvex = convex;
  if (lip_known) meta_.lipschitz = lip;
}

double ShiftedMax::value(const HPoint& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [f, off] : parts_) best = std::max(best, f->value(x) - off);
  return best;
}

MaxEval ShiftedMax::eval_max(const HPoint& x) const {
  std::vector<double> vals(parts_.size());
  int best = 0;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    vals[i] = parts_[i].first->value(x) - parts_[i].second;
    if (vals[i] > vals[best]) best = static_cast<int>(i);
  }
  bool tied = false;
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (static_cast<int>(i) != best && vals[best] - vals[i] <= tie_tol_) tied = true;
  OracleSample s = parts_[best].first->eval(x);
  s.F -= parts_[best].second;
  return {std::move(s), best, tied};
}

std::vector<Piece> ShiftedMax::pieces(const HPoint& x) const {
  std::vector<Piece> out;
  for (const auto& [f, off] : parts_) {
    for (Piece& p : f->pieces(x)) {
      p.value -= off;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<HPoint> ShiftedMax::kinks() const {
  std::vector<HPoint> k;
  for (const auto& [f, off] : parts_) {
    auto fk = f->kinks();
    k.insert(k.end(), fk.begin(), fk.end());
  }
  return k;
}

std::shared_ptr<const ShiftedMax> fn_shifted_max(std::vector<std::pair<FnPtr, double>> parts, double tie_tol) {
  return std::make_shared<ShiftedMax>(std::move(parts), tie_tol);
}

URValue u_R(double D, double R) {
  if (!(R > 0.0)) throw DomainError("u_R requires R > 0");
  const double R2 = R * R;
  if (D <= 0.5 * R2) return {1.0, 0.0, 0.0};
  const double tau = 1.0 / std::sqrt(2.0 * D / R2 - 1.0);
  const double e = std::exp(-4.0 * tau);
  const double t3 = tau * tau * tau;
  return {-std::expm1(-4.0 * tau), -4.0 * t3 * e / R2, 4.0 * (3.0 * t3 * tau * tau - 4.0 * t3 * t3) * e / (R2 * R2)};
}

URLemmas u_R_lemmas(double D, double R) {
  const URValue v = u_R(D, R);
  URLemmas out{};
  out.first = v.u + D * v.du;
  out.second = 2.0 * v.du + D * v.d2u;
  out.third = out.first + out.second * 2.0 * D;
  out.fourth = out.first * 2.0 * std::sqrt(2.0 * std::max(D, 0.0)) - 4.0 * R;
  return out;
}

}  // namespace hgc
