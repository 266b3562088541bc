#include "hypergconv/solvers.hpp"

#include <cmath>
#include <string>

#include "hypergconv/errors.hpp"

namespace hgc {

StepDecision polyak_rule(double gap, double gnorm, double s) {
  double c = gap / (s * gnorm);
  if (c > 1.0 + 1e-12) {
    throw CertificateError("Polyak cos(theta) = " + std::to_string(c) + " > 1: f* or the radius is inconsistent");
  }
  if (c > 1.0) c = 1.0;
  // tanh(step) = c tanh(s). Written with 1 - c tanh(s) computed directly so
  // large s does not round c tanh(s) up to 1.
  const double t = std::tanh(s);
  const double one_minus = (1.0 - c) + c * (2.0 / (std::exp(2.0 * s) + 1.0));
  const double step = c == 1.0 ? s : 0.5 * (std::log1p(c * t) - std::log(one_minus));
  const double sin_theta = std::sqrt((1.0 - c) * (1.0 + c));
  return {step, std::asinh(sin_theta * std::sinh(s)), c};
}

Trace polyak_sgd(const FnOracle& f, double fstar, const HPoint& x0, double s0, int T, const StepRule& rule) {
  if (!(s0 > 0.0)) throw DomainError("Polyak initial radius must be positive");
  Trace tr;
  HPoint x = x0;
  double s = s0;
  for (int k = 0; k < T; ++k) {
    OracleSample smp = f.eval(x);
    double gap = smp.F - fstar;
    if (gap < -1e-9 * std::max(1.0, std::abs(fstar))) {
      throw CertificateError("f(x_k) < f*: supplied optimal value is wrong");
    }
    const double gn = smp.g.norm();
    tr.samples.push_back(smp);
    tr.gaps.push_back(gap);
    // s = 0 certifies x_k = x*; what is left of the gap is rounding.
    if (gap <= 0.0 || gn == 0.0 || s == 0.0) {
      tr.reached_minimizer = true;
      break;
    }
    const StepDecision dec = rule(gap, gn, s);
    tr.polyak.push_back({s, dec.cos_theta, dec.step_len, dec.s_next});
    if (k + 1 < T) x = exp_map(smp.g * (-dec.step_len / gn));
    s = dec.s_next;
  }
  return tr;
}

double polyak_guarantee(double s0, double M, int T) { return 2.0 * zeta(s0) * s0 * s0 * M * M / T; }

Trace rgd(const FnOracle& f, double step, const HPoint& x0, int T, std::optional<double> fstar) {
  if (!fstar) fstar = f.meta().minimum;
  Trace tr;
  HPoint x = x0;
  for (int k = 0; k < T; ++k) {
    OracleSample smp = f.eval(x);
    if (fstar) tr.gaps.push_back(smp.F - *fstar);
    tr.samples.push_back(smp);
    if (k + 1 < T) x = exp_map(smp.g * (-step));
  }
  return tr;
}

namespace {

class Regularized : public FnOracle {
 public:
  Regularized(FnPtr f, double sigma, const HPoint& xref, std::optional<double> r_prime)
      : f_(std::move(f)), sigma_(sigma), xref_(xref) {
    if (!(sigma > 0.0)) throw DomainError("regularization sigma must be positive");
    meta_.name = "regularized";
    meta_.strong_convexity = 1.0;
    meta_.gconvex = f_->meta().gconvex;
    if (f_->meta().smoothness && r_prime) meta_.smoothness = *f_->meta().smoothness / sigma + zeta(*r_prime);
  }
  OracleSample eval(const HPoint& x) const override {
    OracleSample s = f_->eval(x);
    const HTangent v = log_map(x, xref_);
    const double d = v.norm();
    return {s.F / sigma_ + 0.5 * d * d, x, s.g * (1.0 / sigma_) - v};
  }
  double value(const HPoint& x) const override {
    const double d = dist(x, xref_);
    return f_->value(x) / sigma_ + 0.5 * d * d;
  }

 private:
  FnPtr f_;
  double sigma_;
  HPoint xref_;
};

}  // namespace

FnPtr regularize(FnPtr f, double sigma, const HPoint& xref, std::optional<double> r_prime) {
  return std::make_shared<Regularized>(std::move(f), sigma, xref, r_prime);
}

}  // namespace hgc
