#include "hypergconv/cutting_planes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hypergconv/errors.hpp"
#include "hypergconv/kernels.hpp"

namespace hgc {

double CutConfig::effective_eps() const { return eps > 0.0 ? eps : 1.0 / (320.0 * (d - 1)); }

void CutConfig::validate() const {
  if (d < 3) throw DomainError("cut game needs d >= 3");
  if (!(r > 0.0)) throw DomainError("cut game radius must be positive");
  if (r > kRMax) throw RangeError("radius exceeds R_MAX");
  if (eps < 0.0 || !(effective_eps() < 1.0)) throw DomainError("eps must lie in (0, 1)");
  if (n_normal_samples < 1) throw DomainError("n_normal_samples must be positive");
  if (max_rounds < 0) throw DomainError("max_rounds must be non-negative");
}

namespace {

/// Points bucketed by radial shell (width = separation) and by a grid on the
/// direction u = x_{1..d} / sinh(t). Two points closer than the separation
/// sit in adjacent shells and, in the shell of the outer one, in adjacent
/// direction cells: |u - u'| <= 2 sinh(sep/2) / sinh(t_min).
class ShellIndex {
 public:
  ShellIndex(int d, double sep, double radius) : d_(d), sep_(sep), cosh_sep_(std::cosh(sep)) {
    n_shells_ = static_cast<int>(std::floor(radius / sep)) + 2;
    cell_.resize(n_shells_);
    for (int s = 0; s < n_shells_; ++s) {
      const double tm = (s - 1) * sep;
      double c = 2.0;
      if (tm > 0.0) c = std::min(2.0, 2.0 * std::sinh(sep / 2.0) / std::sinh(tm) * (1.0 + 1e-9));
      cell_[s] = c;
    }
  }

  /// Some stored point strictly closer than the separation.
  bool conflicts(const double* x) const { return scan(x, -1, nullptr); }

  void insert(const double* x, int idx) {
    pts_.insert(pts_.end(), x, x + d_ + 1);
    Locus l = locate(x);
    map_[key(l.shell, cells(l, l.shell).data())].push_back(idx);
  }

  /// Minimum distance from point idx to any other stored point found in the
  /// neighbouring cells (every pair closer than the separation is found).
  double nearest_other(int idx) const {
    double best = std::numeric_limits<double>::infinity();
    scan(pts_.data() + static_cast<std::ptrdiff_t>(idx) * (d_ + 1), idx, &best);
    return best;
  }

  int size() const { return static_cast<int>(pts_.size()) / (d_ + 1); }

 private:
  struct Locus {
    int shell;
    std::vector<double> u;
  };

  Locus locate(const double* x) const {
    const double t = std::acosh(std::max(1.0, x[0]));
    Locus l;
    l.shell = std::min(n_shells_ - 1, static_cast<int>(std::floor(t / sep_)));
    l.u.assign(d_, 0.0);
    double n2 = 0.0;
    for (int i = 1; i <= d_; ++i) n2 += x[i] * x[i];
    const double n = std::sqrt(n2);
    if (n > 0.0)
      for (int i = 0; i < d_; ++i) l.u[i] = x[i + 1] / n;
    return l;
  }

  std::vector<long> cells(const Locus& l, int shell) const {
    std::vector<long> c(d_);
    for (int i = 0; i < d_; ++i) c[i] = static_cast<long>(std::floor(l.u[i] / cell_[shell]));
    return c;
  }

  static std::uint64_t key(int shell, const long* c, int d) {
    std::uint64_t k = CounterRng::mix(static_cast<std::uint64_t>(shell) + 0x51ull);
    for (int i = 0; i < d; ++i) k = CounterRng::mix(k ^ static_cast<std::uint64_t>(c[i] + (1l << 40)));
    return k;
  }
  std::uint64_t key(int shell, const long* c) const { return key(shell, c, d_); }

  bool scan(const double* x, int self, double* best) const {
    const Locus l = locate(x);
    std::vector<long> base, cur(d_);
    for (int s = std::max(0, l.shell - 1); s <= std::min(n_shells_ - 1, l.shell + 1); ++s) {
      base = cells(l, s);
      long total = 1;
      for (int i = 0; i < d_; ++i) total *= 3;
      for (long code = 0; code < total; ++code) {
        long rem = code;
        for (int i = 0; i < d_; ++i) {
          cur[i] = base[i] + (rem % 3) - 1;
          rem /= 3;
        }
        auto it = map_.find(key(s, cur.data()));
        if (it == map_.end()) continue;
        for (int j : it->second) {
          if (j == self) continue;
          const double* p = pts_.data() + static_cast<std::ptrdiff_t>(j) * (d_ + 1);
          double ip = x[0] * p[0];
          for (int i = 1; i <= d_; ++i) ip -= x[i] * p[i];
          if (best) {
            *best = std::min(*best, std::acosh(std::max(1.0, ip)));
          } else if (ip < cosh_sep_) {
            return true;
          }
        }
      }
    }
    return false;
  }

  int d_;
  double sep_;
  double cosh_sep_;
  int n_shells_;
  std::vector<double> cell_;
  std::vector<double> pts_;
  std::unordered_map<std::uint64_t, std::vector<int>> map_;
};

/// Radius of a volume-uniform point in B(e0, R) in H^d: proposal density
/// proportional to e^{(d-1)t} on [0, R], accepted with (1 - e^{-2t})^{d-1}.
double sample_radius(CounterRng& rng, int d, double R) {
  const double k = d - 1;
  for (;;) {
    const double u = rng.uniform();
    const double t = R + std::log1p(-u * (-std::expm1(-k * R))) / k;
    const double acc = std::pow(-std::expm1(-2.0 * t), k);
    if (rng.uniform() < acc) return std::max(0.0, t);
  }
}

Vec unit_direction(CounterRng& rng, int d) {
  Vec z(d);
  double n = 0.0;
  do {
    for (int i = 0; i < d; ++i) z[i] = rng.normal();
    n = z.norm();
  } while (n < 1e-300);
  return z / n;
}

Vec point_at(double t, const Vec& u) {
  Vec x(u.size() + 1);
  x[0] = std::cosh(t);
  x.tail(u.size()) = std::sinh(t) * u;
  return x;
}

}  // namespace

HPoint uniform_in_ball(CounterRng& rng, int d, double R) {
  const double t = sample_radius(rng, d, R);
  return HPoint::project(point_at(t, unit_direction(rng, d)));
}

Packing packing_build(const CutConfig& cfg) {
  cfg.validate();
  const int d = cfg.d;
  const double eps = cfg.effective_eps();
  Packing p;
  p.separation = 2.0 * eps * cfg.r;
  p.radius = cfg.r - eps * cfg.r;
  p.floor_estimate = 0.25 * std::exp((d - 1) * cfg.r / 4.0);
  p.volume_estimate = volume_ball(d, p.radius) / volume_ball(d, p.separation);

  CounterRng rng(cfg.packing_seed, 0x7061636bull);
  ShellIndex index(d, p.separation, p.radius);
  const double cosh_R = std::cosh(p.radius);
  auto accept = [&](const Vec& c) {
    const int idx = static_cast<int>(p.centers.size());
    index.insert(c.data(), idx);
    p.centers.push_back(HPoint::project(c));
  };

  const HPoint xref = HPoint::origin(d);
  accept(xref.coords());
  // Frontier phase.
  std::vector<int> active{0};
  while (!active.empty()) {
    const std::size_t slot = rng.below(active.size());
    const HPoint a = p.centers[active[slot]];
    bool grown = false;
    for (int k = 0; k < cfg.frontier_tries; ++k) {
      ++p.proposals;
      const double len = p.separation * (1.0 + rng.uniform());
      Vec v0 = Vec::Zero(d + 1);
      v0.tail(d) = len * unit_direction(rng, d);
      const HTangent v = ptransport(xref, a, HTangent{xref, v0});
      const HPoint y = exp_map(v);
      if (y[0] > cosh_R || index.conflicts(y.coords().data())) continue;
      accept(y.coords());
      active.push_back(static_cast<int>(p.centers.size()) - 1);
      ++p.frontier_accepted;
      grown = true;
      break;
    }
    if (!grown) {
      active[slot] = active.back();
      active.pop_back();
    }
  }
  // Uniform top-up with the consecutive-rejection stopping rule.
  long fails = 0;
  for (;;) {
    const long limit = std::min<long>(200l * static_cast<long>(p.centers.size()), cfg.packing_fail_cap);
    if (fails >= limit) break;
    ++p.proposals;
    const HPoint y = uniform_in_ball(rng, d, p.radius);
    if (index.conflicts(y.coords().data())) {
      ++fails;
      continue;
    }
    accept(y.coords());
    ++p.uniform_accepted;
    fails = 0;
  }
  p.final_fail_run = fails;

  p.coords.resize(d + 1, static_cast<Eigen::Index>(p.centers.size()));
  for (std::size_t i = 0; i < p.centers.size(); ++i) p.coords.col(static_cast<Eigen::Index>(i)) = p.centers[i].coords();
  return p;
}

double packing_min_distance(const Packing& p) {
  if (p.centers.empty()) return std::numeric_limits<double>::infinity();
  const int d = p.centers.front().dim();
  ShellIndex index(d, std::max(p.separation, 1e-12), std::max(p.radius, 1e-12));
  for (std::size_t i = 0; i < p.centers.size(); ++i) index.insert(p.centers[i].coords().data(), static_cast<int>(i));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < index.size(); ++i) best = std::min(best, index.nearest_other(i));
  return best;
}

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

double volume_ball(int d, double r) {
  if (d < 2) throw DomainError("volume_ball needs d >= 2");
  if (!(r >= 0.0)) throw DomainError("volume_ball needs r >= 0");
  if (r == 0.0) return 0.0;
  auto f = [d](double t) { return std::pow(std::sinh(t), d - 1); };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, r, 20, 1e-12);
  return sphere_area(d) * integral;
}

double volume_upper_bound(int d, double r) {
  return sphere_area(d) * std::exp(r * (d - 1)) / ((d - 1) * std::pow(2.0, d - 1));
}

double volume_lower_bound(int d, double r) { return 0.25 * volume_upper_bound(d, r); }

CutGameState::CutGameState(const CutConfig& cfg, std::shared_ptr<const Packing> packing)
    : cfg_(cfg), eps_(cfg.effective_eps()), packing_(std::move(packing)), rng_(cfg.seed, 0x6e6f726dull) {
  cfg_.validate();
  alive_.resize(packing_->centers.size());
  for (std::size_t i = 0; i < alive_.size(); ++i) alive_[i] = static_cast<int>(i);
}

bool CutGameState::consistent(const HPoint& c) const {
  const double er = eps_ * cfg_.r;
  for (const CutRound& rd : rounds_) {
    if (rd.g.inner(log_map(rd.x, c)) > 1e-9) return false;
    if (!(std::asinh(std::abs(mink_inner(c.coords(), rd.g.vec)) / rd.g.norm()) > er)) return false;
  }
  return true;
}

CutRespond CutGameState::respond(const HPoint& x) {
  const int d = cfg_.d;
  if (x.dim() != d) throw DimensionError("query dimension does not match the game");
  CutRespond out;
  out.before = static_cast<int>(alive_.size());
  if (alive_.empty()) {
    out.exhausted = true;
    return out;
  }
  const double thresh = std::sinh(eps_ * cfg_.r);

  const std::vector<HTangent> frame = tangent_frame(x);
  const int m = cfg_.n_normal_samples;
  Eigen::MatrixXd W(d + 1, m);
  for (int j = 0; j < m; ++j) {
    const Vec z = unit_direction(rng_, d);
    Vec w = Vec::Zero(d + 1);
    for (int i = 0; i < d; ++i) w += z[i] * frame[i].vec;
    W.col(j) = HTangent::project(x, w).vec;
    const double n = std::sqrt(mink_inner(W.col(j), W.col(j)));
    W.col(j) /= n;
  }
  Eigen::MatrixXd C(d + 1, static_cast<Eigen::Index>(alive_.size()));
  for (std::size_t i = 0; i < alive_.size(); ++i) C.col(static_cast<Eigen::Index>(i)) = packing_->coords.col(alive_[i]);

  const std::vector<NormalScore> sc =
      cfg_.parallel ? score_normals_omp(C, W, thresh) : score_normals_serial(C, W, thresh);

  // Fewest cut balls, then more survivors on the better side, then lowest index.
  int best = -1;
  int best_keep = -1;
  int most = -1;
  int most_keep = 0;
  for (int j = 0; j < m; ++j) {
    const int keep = std::max(sc[j].pos, sc[j].neg);
    if (best < 0 || sc[j].cut < sc[best].cut || (sc[j].cut == sc[best].cut && keep > best_keep)) {
      best = j;
      best_keep = keep;
    }
    if (keep > most_keep) {
      most = j;
      most_keep = keep;
    }
  }
  if (most_keep == 0) {
    out.exhausted = true;
    return out;
  }
  // A min-cut normal that keeps nothing would discard candidates another normal keeps.
  if (best_keep == 0) best = most;

  const int sign = sc[best].neg >= sc[best].pos ? +1 : -1;
  const Vec w = sign * W.col(best);
  std::vector<int> next;
  next.reserve(std::max(sc[best].pos, sc[best].neg));
  for (int idx : alive_) {
    if (mink_inner(packing_->coords.col(idx), w) < -thresh) next.push_back(idx);
  }
  alive_.swap(next);

  out.g = HTangent{x, w};
  out.after = static_cast<int>(alive_.size());
  out.cut = sc[best].cut;
  out.normal_index = best;

  CutRound rd{round(), x, out.g, out.before, out.after, out.cut, best, 4 * out.after >= out.before, true};
  rounds_.push_back(rd);
  // Survivors were consistent with the earlier rounds; checking every round
  // again keeps the verification independent of the pruning code path.
  bool ok = true;
  for (int idx : alive_) {
    const Vec& c = packing_->coords.col(idx);
    for (const CutRound& h : rounds_) {
      const double ip = mink_inner(c, h.g.vec);
      ok = ok && ip <= 1e-9 && std::asinh(std::abs(ip)) > eps_ * cfg_.r;
    }
  }
  rounds_.back().consistent = ok;
  return out;
}

namespace {

class RepeatXref : public CutPlayer {
 public:
  std::string name() const override { return "repeat-xref"; }
  HPoint next(const CutView& v) override { return v.xref; }
};

class RandomQuery : public CutPlayer {
 public:
  explicit RandomQuery(std::uint64_t seed) : rng_(seed, 0x706c6179ull) {}
  std::string name() const override { return "random-query"; }
  HPoint next(const CutView& v) override { return uniform_in_ball(rng_, v.d, v.r); }

 private:
  CounterRng rng_;
};

/// Steps against the last answer with length r / (2 sqrt(k + 1)), clipped to B(x_ref, r).
class SubgradientWalk : public CutPlayer {
 public:
  std::string name() const override { return "subgradient-walk"; }
  HPoint next(const CutView& v) override {
    if (v.rounds->empty()) return v.xref;
    const CutRound& last = v.rounds->back();
    const double k = static_cast<double>(v.rounds->size());
    const double len = v.r / (2.0 * std::sqrt(k));
    HPoint y = exp_map(last.g * (-len / last.g.norm()));
    const double t = dist(v.xref, y);
    if (t > v.r) y = geodesic(v.xref, y, v.r / t);
    return y;
  }
};

}  // namespace

std::unique_ptr<CutPlayer> make_cut_player(const std::string& name, std::uint64_t seed) {
  if (name == "repeat-xref") return std::make_unique<RepeatXref>();
  if (name == "random-query") return std::make_unique<RandomQuery>(seed);
  if (name == "subgradient-walk") return std::make_unique<SubgradientWalk>();
  throw DomainError("unknown cut-game player: " + name);
}

CutTranscript play_game(const CutConfig& cfg, CutPlayer& player, std::shared_ptr<const Packing> packing) {
  cfg.validate();
  if (!packing) packing = std::make_shared<const Packing>(packing_build(cfg));
  CutGameState state(cfg, packing);
  CutTranscript tr;
  tr.player = player.name();
  tr.d = cfg.d;
  tr.r = cfg.r;
  tr.eps = cfg.effective_eps();
  tr.seed = cfg.seed;
  tr.initial_candidates = static_cast<int>(packing->centers.size());
  tr.target_rounds = (cfg.d - 1) * cfg.r / 32.0;

  const HPoint xref = HPoint::origin(cfg.d);
  if (state.candidates().empty()) {
    tr.exhausted = true;
    return tr;
  }
  for (int k = 0; k < cfg.max_rounds; ++k) {
    const CutView view{cfg.d, cfg.r, xref, &state.rounds()};
    const HPoint x = player.next(view);
    const CutRespond resp = state.respond(x);
    if (resp.exhausted) {
      tr.exhausted = true;
      break;
    }
  }
  tr.rounds = state.rounds();
  tr.rounds_survived = static_cast<int>(tr.rounds.size());
  for (const CutRound& rd : tr.rounds) {
    if (!rd.quarter_ok) ++tr.quarter_law_violations;
    tr.all_consistent = tr.all_consistent && rd.consistent;
  }
  if (!state.candidates().empty()) {
    tr.has_xstar = true;
    tr.xstar = state.candidate(state.candidates().front());
    tr.xstar_replay_ok = state.consistent(tr.xstar);
  }
  return tr;
}

}  // namespace hgc
