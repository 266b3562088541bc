#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hypergconv/errors.hpp"
#include "hypergconv/simplex_qp.hpp"
#include "hypergconv/zoo.hpp"

namespace hgc {

Eigen::VectorXd solve_simplex_qp(const Eigen::MatrixXd& Qin, const Eigen::VectorXd& c) {
  const int m = static_cast<int>(c.size());
  if (m == 0) return {};
  const double ridge = 1e-14 * (1.0 + Qin.diagonal().cwiseAbs().maxCoeff());
  const Eigen::MatrixXd Q = Qin + ridge * Eigen::MatrixXd::Identity(m, m);

  // Start at the best vertex.
  int start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double v = 0.5 * Q(i, i) - c[i];
    if (v < best) {
      best = v;
      start = i;
    }
  }
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  a[start] = 1.0;
  std::vector<int> W{start};
  const double scale = 1.0 + c.cwiseAbs().maxCoeff() + Q.cwiseAbs().maxCoeff();

  for (int iter = 0; iter < 50 * m + 50; ++iter) {
    const int k = static_cast<int>(W.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) K(i, j) = Q(W[i], W[j]);
      K(i, k) = 1.0;
      K(k, i) = 1.0;
      rhs[i] = c[W[i]];
    }
    rhs[k] = 1.0;
    const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
    const double nu = sol[k];

    double t = 1.0;
    int blocking = -1;
    for (int i = 0; i < k; ++i) {
      const double target = sol[i];
      const double cur = a[W[i]];
      if (target < 0.0 && cur - target > 0.0) {
        const double ti = cur / (cur - target);
        if (ti < t) {
          t = ti;
          blocking = i;
        }
      }
    }
    for (int i = 0; i < k; ++i) a[W[i]] += t * (sol[i] - a[W[i]]);

    if (blocking >= 0) {
      a[W[blocking]] = 0.0;
      W.erase(W.begin() + blocking);
      continue;
    }
    // Full step: check multipliers of the inactive coordinates.
    const Eigen::VectorXd grad = Q * a - c;
    int enter = -1;
    double most = -1e-14 * scale;
    for (int j = 0; j < m; ++j) {
      if (std::find(W.begin(), W.end(), j) != W.end()) continue;
      const double mu = grad[j] + nu;
      if (mu < most) {
        most = mu;
        enter = j;
      }
    }
    if (enter < 0) break;
    W.push_back(enter);
  }
  a = a.cwiseMax(0.0);
  return a / a.sum();
}

Moreau::Moreau(FnPtr f, MoreauParams p) : f_(std::move(f)), p_(p) {
  if (!(p_.lambda > 0.0) || p_.lambda > kRMax) throw DomainError("Moreau lambda must lie in (0, R_MAX]");
  meta_.name = "moreau";
  meta_.gconvex = f_->meta().gconvex;
  meta_.lipschitz = f_->meta().lipschitz;
  meta_.smoothness = 1.0 / std::tanh(p_.lambda);
  meta_.minimizer = f_->meta().minimizer;
  meta_.minimum = f_->meta().minimum;
}

ProxResult Moreau::prox(const HPoint& x) const {
  const double lam = p_.lambda;
  auto phi = [&](const HPoint& y) {
    const double d = dist(x, y);
    return f_->value(y) + d * d / (2.0 * lam);
  };
  auto clamp_ball = [&](const HPoint& y) {
    const double d = dist(x, y);
    return d > lam ? geodesic(x, y, lam / d) : y;
  };

  // Prox-linear iteration: linearize every smooth branch of f at y, keep the
  // quadratic term with identity metric, solve the resulting simplex QP in
  // closed form for the step, then backtrack on the true objective.
  HPoint y = x;
  double val = phi(y);
  double last_step = std::numeric_limits<double>::infinity();
  int it = 0;
  bool converged = false;
  for (; it < p_.prox_max_iter; ++it) {
    const std::vector<Piece> pcs = f_->pieces(y);
    const int m = static_cast<int>(pcs.size());
    const HTangent u = log_map(y, x);
    Eigen::MatrixXd Q(m, m);
    Eigen::VectorXd c(m);
    for (int i = 0; i < m; ++i) {
      c[i] = pcs[i].value + mink_inner(pcs[i].grad, u.vec);
      for (int j = 0; j <= i; ++j) Q(i, j) = Q(j, i) = lam * mink_inner(pcs[i].grad, pcs[j].grad);
    }
    const Eigen::VectorXd alpha = solve_simplex_qp(Q, c);
    Vec w = u.vec;
    for (int i = 0; i < m; ++i) w -= lam * alpha[i] * pcs[i].grad;
    HTangent step = HTangent::project(y, std::move(w));
    const double full = step.norm();
    if (full < p_.prox_tol) {
      last_step = full;
      converged = true;
      break;
    }
    double t = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
      HPoint cand = clamp_ball(exp_map(step * t));
      const double cv = phi(cand);
      // Allow rounding-level increases so steps near the optimum are taken.
      if (cv <= val + 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(val))) {
        last_step = dist(y, cand);
        y = cand;
        val = cv;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    if (last_step < p_.prox_tol) {
      converged = true;
      break;
    }
  }

  // The branch model cannot see isolated kinks; compare against them directly.
  bool kink_won = false;
  for (const HPoint& k : f_->kinks()) {
    if (dist(x, k) > lam) continue;
    const double kv = phi(k);
    if (kv <= val) {
      y = k;
      val = kv;
      kink_won = true;
    }
  }
  if (!converged && !kink_won) {
    const Vec& c = y.coords();
    throw ConvergenceError("prox did not converge in " + std::to_string(p_.prox_max_iter) + " iterations",
                           std::vector<double>(c.data(), c.data() + c.size()), last_step);
  }
  return {y, val, it, kink_won ? 0.0 : last_step};
}

OracleSample Moreau::eval(const HPoint& x) const {
  const ProxResult pr = prox(x);
  return {pr.value, x, log_map(x, pr.y) * (-1.0 / p_.lambda)};
}

std::shared_ptr<const Moreau> fn_moreau(FnPtr f, MoreauParams p) {
  return std::make_shared<Moreau>(std::move(f), p);
}

}  // namespace hgc
