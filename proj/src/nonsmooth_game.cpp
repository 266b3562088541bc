#include <cmath>
#include <limits>
#include <string>

#include "hypergconv/errors.hpp"
#include "hypergconv/resisting.hpp"

namespace hgc {

namespace {

int sub_index(int i, int s) { return 2 * (i - 1) + (s < 0 ? 1 : 0); }

}  // namespace

NonsmoothGame::NonsmoothGame(int T, double r) : T_(T), r_(r) {
  if (T < 2) throw DomainError("resisting oracle needs d = T >= 2");
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  if (r > kRMax) throw RangeError("radius exceeds R_MAX");
  a_ = std::atanh(std::tanh(r) / std::sqrt(static_cast<double>(T)));
  delta_ = a_ / (2.0 * T);
  xref_ = HPoint::origin(T);
  subs_.reserve(2 * T);
  for (int i = 1; i <= T; ++i) {
    for (int s : {+1, -1}) {
      const HPoint zi = z(i, s);
      // Unit tangent at z along the geodesic leaving x_ref; S_i^s is the
      // hyperplane through z orthogonal to it.
      Vec n = Vec::Zero(T + 1);
      n[0] = std::sinh(a_);
      n[i] = s * std::cosh(a_);
      subs_.push_back(TotallyGeodesicSub::from_normals(zi, {n}));
    }
  }
  used_.assign(T + 1, false);
}

HPoint NonsmoothGame::z(int i, int s) const {
  Vec c = Vec::Zero(T_ + 1);
  c[0] = std::cosh(a_);
  c[i] = s * std::sinh(a_);
  return HPoint::project(std::move(c));
}

const TotallyGeodesicSub& NonsmoothGame::sub(int i, int s) const { return subs_.at(sub_index(i, s)); }

double NonsmoothGame::h(int i, int s, const HPoint& x) const {
  return std::asinh(sub(i, s).residual(x.coords())) - a_;
}

Selection NonsmoothGame::select(const HPoint& x) {
  if (x.dim() != T_) throw DimensionError("query dimension does not match the game");
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  int bi = -1, bs = 0;
  for (int i = 1; i <= T_; ++i) {
    if (used_[i]) continue;
    for (int s : {+1, -1}) {
      const double v = h(i, s, x);
      if (v > best) {
        second = best;
        best = v;
        bi = i;
        bs = s;
      } else if (v > second) {
        second = v;
      }
    }
  }
  used_[bi] = true;
  Selection sel{bi, bs, best, best - second, best - second <= 1e-12, false};
  return sel;
}

std::shared_ptr<const ShiftedMax> NonsmoothGame::build_max(const std::vector<Selection>& chosen) const {
  std::vector<std::pair<FnPtr, double>> parts;
  parts.reserve(chosen.size());
  for (std::size_t l = 0; l < chosen.size(); ++l)
    parts.emplace_back(fn_dist_sub(sub(chosen[l].i, chosen[l].s), a_), static_cast<double>(l) * delta_);
  return fn_shifted_max(std::move(parts));
}

HPoint NonsmoothGame::build_xstar(const std::vector<Selection>& chosen) const {
  // Step of length r/sqrt(d) towards every chosen hyperplane, i.e. along the
  // negated gradients -grad h_{i_k}^{s_k}(x_ref) = s_k e_{i_k}.
  const double c = r_ / std::sqrt(static_cast<double>(T_));
  Vec v = Vec::Zero(T_ + 1);
  for (const Selection& sel : chosen) v[sel.i] += c * sel.s;
  return exp_map(xref_, v);
}

std::vector<Selection> NonsmoothGame::padded() const {
  std::vector<Selection> out = chosen_;
  for (int i = 1; i <= T_; ++i)
    if (!used_[i]) out.push_back({i, +1, std::numeric_limits<double>::quiet_NaN(), 0.0, false, false});
  return out;
}

OracleSample NonsmoothGame::respond(const HPoint& x) {
  if (queries() >= T_) throw StateError("query budget of " + std::to_string(T_) + " exhausted");
  Selection sel = select(x);
  chosen_.push_back(sel);
  fk_ = build_max(chosen_);
  MaxEval me = fk_->eval_max(x);
  chosen_.back().value_tied = me.tied;
  history_.push_back(me.sample);
  return me.sample;
}

GameFinal NonsmoothGame::finalize() const {
  std::vector<Selection> chosen = padded();
  auto fmax = build_max(chosen);
  return {fmax, fmax, build_xstar(chosen), -a_, chosen};
}

SmoothGame::SmoothGame(int T, double r, double prox_tol) : NonsmoothGame(T, r), prox_tol_(prox_tol) {
  lambda_ = delta_ / 4.0;
}

double SmoothGame::L() const { return 1.0 / std::tanh(lambda_); }

OracleSample SmoothGame::respond(const HPoint& x) {
  if (queries() >= T_) throw StateError("query budget of " + std::to_string(T_) + " exhausted");
  Selection sel = select(x);
  chosen_.push_back(sel);
  fk_ = build_max(chosen_);
  MaxEval me = fk_->eval_max(x);
  chosen_.back().value_tied = me.tied;
  twin_.push_back(me.sample);
  OracleSample smooth = fn_moreau(fk_, moreau_params())->eval(x);
  history_.push_back(smooth);
  return smooth;
}

GameFinal SmoothGame::finalize() const {
  GameFinal fin = NonsmoothGame::finalize();
  fin.f = fn_moreau(fin.nonsmooth, moreau_params());
  return fin;
}

GameOracle::GameOracle(std::shared_ptr<NonsmoothGame> game) : game_(std::move(game)) {
  meta_.name = "resisting_oracle";
  meta_.lipschitz = 1.0;
  meta_.minimum = -game_->a();
}

OracleSample GameOracle::eval(const HPoint& x) const {
  if (game_->queries() < game_->T()) return game_->respond(x);
  if (!frozen_) frozen_ = std::make_shared<const GameFinal>(game_->finalize());
  return frozen_->f->eval(x);
}

GameCertificate certify(const NonsmoothGame& game, const GameFinal& fin, const std::vector<OracleSample>& history,
                        double bound) {
  GameCertificate c{};
  c.dist_xref_xstar = dist(game.xref(), fin.xstar);
  c.f_xstar = fin.f->value(fin.xstar);
  c.fstar = fin.fstar;
  c.bound = bound;
  c.min_h = std::numeric_limits<double>::infinity();
  c.min_gap = std::numeric_limits<double>::infinity();
  const double target = std::cosh(game.r()) / std::cosh(game.a());
  for (const Selection& sel : fin.chosen) {
    c.max_sub_dist = std::max(c.max_sub_dist, sub_dist(fin.xstar, game.sub(sel.i, sel.s)).dist);
    const double coshb = -mink_inner(fin.xstar.coords(), game.z(sel.i, sel.s).coords());
    c.max_cosh_residual = std::max(c.max_cosh_residual, std::abs(coshb - target));
    if (!std::isnan(sel.h)) c.min_h = std::min(c.min_h, sel.h);
  }
  for (const OracleSample& s : history) {
    const double v = fin.f->value(s.x);
    c.max_replay_error = std::max(c.max_replay_error, std::abs(v - s.F));
    c.gaps.push_back(v - fin.fstar);
    c.min_gap = std::min(c.min_gap, v - fin.fstar);
  }
  return c;
}

double nonsmooth_gap_bound(double r, int T) { return r / (2.0 * zeta(r) * std::sqrt(static_cast<double>(T))); }

double smooth_gap_bound(double L, double r, int T) {
  const double z = zeta(r);
  return 0.5 * (L * r * r / (static_cast<double>(T) * T)) / (8.0 * z * z);
}

}  // namespace hgc
