#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hypergconv/zoo.hpp"

namespace hgc {

/// State of the minimal-ball Polyak method at one query.
struct PolyakStep {
  double s;          // radius of the ball around x_k certified to contain x*
  double cos_theta;  // (f(x_k) - f*) / (s_k |g_k|)
  double step_len;   // eta_k |g_k|, the geodesic length of the move
  double s_next;
};

struct Trace {
  std::vector<OracleSample> samples;
  std::vector<double> gaps;  // f(x_k) - f*, filled when f* is known
  std::vector<PolyakStep> polyak;
  bool reached_minimizer = false;
};

struct StepDecision {
  double step_len;
  double s_next;
  double cos_theta;
};

/// (gap, |g|, s) -> step length along -g/|g| and the next radius.
using StepRule = std::function<StepDecision(double gap, double gnorm, double s)>;

/// Hyperbolic Polyak rule: tanh(step) = cos(theta) tanh(s),
/// sinh(s_next) = sin(theta) sinh(s). Throws CertificateError when
/// cos(theta) exceeds 1 by more than 1e-12.
StepDecision polyak_rule(double gap, double gnorm, double s);

/// Runs T oracle queries of subgradient descent with the given step rule
/// (Polyak by default). Stops early when the gap, the subgradient or the
/// certified radius is zero.
Trace polyak_sgd(const FnOracle& f, double fstar, const HPoint& x0, double s0, int T,
                 const StepRule& rule = polyak_rule);

/// 2 zeta(s0) s0^2 M^2 / T, the bound on min_k gap_k^2 after T queries.
double polyak_guarantee(double s0, double M, int T);

/// x_{k+1} = exp(x_k, -step g_k), T queries.
Trace rgd(const FnOracle& f, double step, const HPoint& x0, int T, std::optional<double> fstar = std::nullopt);

/// f/sigma + dist(., xref)^2 / 2. When f has a smoothness bound L and
/// r_prime is given, the metadata records L/sigma + zeta(r_prime), valid on
/// B(xref, r_prime).
FnPtr regularize(FnPtr f, double sigma, const HPoint& xref, std::optional<double> r_prime = std::nullopt);

}  // namespace hgc
