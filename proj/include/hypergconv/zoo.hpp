#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypergconv/hyperboloid.hpp"

namespace hgc {

struct OracleSample {
  double F = 0.0;
  HPoint x;
  HTangent g;
};

struct FnMeta {
  std::string name;
  std::optional<double> lipschitz;
  std::optional<double> smoothness;
  std::optional<double> strong_convexity;
  std::optional<HPoint> minimizer;
  std::optional<double> minimum;
  bool gconvex = true;
};

/// One smooth branch of a function near a point: value and Riemannian
/// gradient (tangent at the evaluation point).
struct Piece {
  double value;
  Vec grad;
};

/// First-order oracle x -> (f(x), g in ∂f(x)). Implementations are immutable.
class FnOracle {
 public:
  virtual ~FnOracle() = default;

  virtual OracleSample eval(const HPoint& x) const = 0;
  virtual double value(const HPoint& x) const { return eval(x).F; }

  /// Smooth branches whose pointwise max equals f around x. The default is a
  /// single branch built from eval(); nonsmooth oracles override this so the
  /// prox solver can see their kinks.
  virtual std::vector<Piece> pieces(const HPoint& x) const;
  /// Isolated points where f is not a max of smooth branches (e.g. the center
  /// of a distance function).
  virtual std::vector<HPoint> kinks() const { return {}; }

  const FnMeta& meta() const { return meta_; }

 protected:
  FnMeta meta_;
};

using FnPtr = std::shared_ptr<const FnOracle>;

/// dist(x, z); zero subgradient at x = z.
FnPtr fn_dist_point(const HPoint& z);
/// dist(x, z)^2 / 2; gradient -log_x(z).
FnPtr fn_sqdist_point(const HPoint& z);
/// dist(x, S) - shift; zero subgradient on S.
FnPtr fn_dist_sub(const TotallyGeodesicSub& S, double shift);
/// c + sum_i w_i f_i.
FnPtr fn_affine_sum(double constant, std::vector<std::pair<double, FnPtr>> terms);

struct MaxEval {
  OracleSample sample;
  int active = 0;
  bool tied = false;
};

/// max_i (f_i(x) - offset_i); subgradient of the lowest-index maximizer.
class ShiftedMax : public FnOracle {
 public:
  ShiftedMax(std::vector<std::pair<FnPtr, double>> parts, double tie_tol);

  OracleSample eval(const HPoint& x) const override { return eval_max(x).sample; }
  double value(const HPoint& x) const override;
  std::vector<Piece> pieces(const HPoint& x) const override;
  std::vector<HPoint> kinks() const override;

  MaxEval eval_max(const HPoint& x) const;
  const std::vector<std::pair<FnPtr, double>>& parts() const { return parts_; }

 private:
  std::vector<std::pair<FnPtr, double>> parts_;
  double tie_tol_;
};

std::shared_ptr<const ShiftedMax> fn_shifted_max(std::vector<std::pair<FnPtr, double>> parts,
                                                 double tie_tol = 1e-12);

struct MoreauParams {
  double lambda = 0.1;
  double prox_tol = 1e-10;
  int prox_max_iter = 10000;
};

struct ProxResult {
  HPoint y;
  double value;  // f(y) + dist(x,y)^2 / (2 lambda)
  int iterations;
  double residual;  // length of the last accepted step
};

/// f_lambda(x) = min_{y in B(x, lambda)} f(y) + dist(x,y)^2/(2 lambda), with
/// gradient -log_x(y_lambda)/lambda.
class Moreau : public FnOracle {
 public:
  Moreau(FnPtr f, MoreauParams p);

  OracleSample eval(const HPoint& x) const override;
  ProxResult prox(const HPoint& x) const;
  const MoreauParams& params() const { return p_; }
  const FnPtr& inner() const { return f_; }

 private:
  FnPtr f_;
  MoreauParams p_;
};

std::shared_ptr<const Moreau> fn_moreau(FnPtr f, MoreauParams p);

/// <g, log_y(x)> with y = g.base. Not g-convex.
FnPtr fn_pseudo_affine(const HTangent& g);

struct URValue {
  double u;
  double du;
  double d2u;
};
/// u_R(D) = 1 for D <= R^2/2, else 1 - exp(-4 / sqrt(2D/R^2 - 1)), with its
/// first two derivatives in D.
URValue u_R(double D, double R);

/// The four scalar quantities bounded for the u_R wrapper:
///   first  = u + D u'                       (>= 0)
///   second = 2u' + D u''                    (<= 0)
///   third  = first + second * 2D            (> 0)
///   fourth = first * 2 sqrt(2D) - 4R        (<= 0)
struct URLemmas {
  double first;
  double second;
  double third;
  double fourth;
};
URLemmas u_R_lemmas(double D, double R);

}  // namespace hgc
