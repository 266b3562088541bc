#include "hypergconv/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "hypergconv/cutting_planes.hpp"
#include "hypergconv/errors.hpp"
#include "hypergconv/interpolation.hpp"
#include "hypergconv/resisting.hpp"
#include "hypergconv/solvers.hpp"
#include "hypergconv/worst.hpp"

namespace hgc {

const std::vector<std::string> kKinds = {"lb-nonsmooth", "lb-smooth", "polyak-worst", "cut-game", "interp", "zoo-validate"};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
T get(const Json& p, const char* key, T def) {
  if (!p.contains(key)) return def;
  try {
    return p.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("parameter '") + key + "': " + e.what());
  }
}

/// Scalar or array parameter as a list.
template <class T>
std::vector<T> get_list(const Json& p, const char* key, std::vector<T> def) {
  if (!p.contains(key)) return def;
  const Json& v = p.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("parameter '") + key + "': " + e.what());
  }
}

class Timer {
 public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

/// "k=v;k=v" with shortest round-trip formatting.
class Kv {
 public:
  Kv& operator()(const std::string& k, double v) { return add(k, fmt_double(v)); }
  Kv& operator()(const std::string& k, int v) { return add(k, std::to_string(v)); }
  Kv& operator()(const std::string& k, long v) { return add(k, std::to_string(v)); }
  Kv& operator()(const std::string& k, bool v) { return add(k, v ? "true" : "false"); }
  Kv& operator()(const std::string& k, const std::string& v) { return add(k, v); }
  Kv& operator()(const std::string& k, const char* v) { return add(k, v); }
  std::string str() const { return s_; }

 private:
  Kv& add(const std::string& k, const std::string& v) {
    if (!s_.empty()) s_ += ';';
    s_ += k + "=" + v;
    return *this;
  }
  std::string s_;
};

Row make_row(const std::string& kind, const std::string& instance, std::uint64_t seed, const std::string& params,
             double measured, double bound, bool pass, const std::string& detail, double ms) {
  return {kind, instance, seed, params, measured, bound, pass, detail, ms};
}

HPoint random_tangent_point(CounterRng& rng, const HPoint& x, double len) {
  const int d = x.dim();
  Vec z = Vec::Zero(d + 1);
  for (int i = 1; i <= d; ++i) z[i] = rng.normal();
  const HPoint o = HPoint::origin(d);
  const HTangent v = ptransport(o, x, HTangent{o, z});
  return exp_map(v * (len / v.norm()));
}

HTangent random_unit_tangent(CounterRng& rng, const HPoint& x) {
  const int d = x.dim();
  Vec z = Vec::Zero(d + 1);
  for (int i = 1; i <= d; ++i) z[i] = rng.normal();
  const HPoint o = HPoint::origin(d);
  const HTangent v = ptransport(o, x, HTangent{o, z});
  return v * (1.0 / v.norm());
}

Json sample_json(const OracleSample& s) {
  return {{"F", s.F}, {"x", to_json(s.x.coords())}, {"g", to_json(s.g.vec)}};
}

// ---------------------------------------------------------------- games

struct PlayerRun {
  std::vector<OracleSample> queries;
  std::string error;
};

PlayerRun run_player(const std::string& player, const FnOracle& oracle, const NonsmoothGame& game, int T,
                     CounterRng& rng) {
  PlayerRun out;
  const HPoint xref = game.xref();
  try {
    if (player == "polyak") {
      out.queries = polyak_sgd(oracle, -game.a(), xref, game.r(), T).samples;
    } else if (player == "rgd") {
      out.queries = rgd(oracle, game.r() / std::sqrt(static_cast<double>(T)), xref, T).samples;
    } else if (player == "random") {
      for (int k = 0; k < T; ++k) out.queries.push_back(oracle.eval(random_in_ball(rng, xref, game.r())));
    } else {
      throw ConfigError("unknown player: " + player);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

RunResult run_lb(const ExperimentConfig& cfg, bool smooth) {
  const std::string kind = smooth ? "lb-smooth" : "lb-nonsmooth";
  const Json& p = cfg.params;
  const auto Ts = get_list<int>(p, "T", {4, 8, 16});
  const auto rs = get_list<double>(p, "r", {1.0, 2.0, 5.0});
  const auto players = get_list<std::string>(p, "players", {"polyak", "rgd", "random"});
  const int sandwich_samples = get<int>(p, "sandwich_samples", 100);
  const int lip_pairs = get<int>(p, "lipschitz_pairs", 10);
  const double lip_len = get<double>(p, "lipschitz_distance", 0.05);

  RunResult res;
  res.transcript["kind"] = kind;
  res.transcript["rng"] = CounterRng::kName;
  res.transcript["instances"] = Json::array();
  for (int T : Ts) {
    for (double r : rs) {
      for (const std::string& player : players) {
        Timer timer;
        const std::string params = Kv()("T", T)("r", r)("player", player).str();
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(T) * 1000003ull + static_cast<std::uint64_t>(r * 1000.0));
        std::shared_ptr<NonsmoothGame> game;
        try {
          game = smooth ? std::make_shared<SmoothGame>(T, r) : std::make_shared<NonsmoothGame>(T, r);
        } catch (const Error& e) {
          throw ConfigError(kind + " " + params + ": " + e.what());
        }
        GameOracle oracle(game);
        const PlayerRun run = run_player(player, oracle, *game, T, rng);
        if (!run.error.empty()) {
          res.rows.push_back(make_row(kind, params, cfg.seed, params, kInf, 0.0, false, "error=" + run.error, timer.ms()));
          continue;
        }
        const GameFinal fin = game->finalize();
        double bound = 0.0;
        double L = 0.0;
        if (smooth) {
          L = static_cast<SmoothGame&>(*game).L();
          bound = smooth_gap_bound(L, r, T);
        } else {
          bound = nonsmooth_gap_bound(r, T);
        }
        const GameCertificate cert = certify(*game, fin, game->history(), bound);
        const double dist_err = std::abs(cert.dist_xref_xstar - r);
        const double fstar_err = std::abs(cert.f_xstar - cert.fstar);
        const double a_err = std::abs(cert.fstar + game->a());
        const double replay_tol = smooth ? 1e-8 : 1e-9;
        const double gap_tol = smooth ? 1e-6 : 1e-9;
        bool ok = dist_err <= 1e-9 && fstar_err <= 1e-8 && a_err <= 1e-8 && cert.max_sub_dist <= 1e-8 &&
                  cert.max_cosh_residual <= 1e-9 && cert.max_replay_error <= replay_tol &&
                  cert.min_gap >= bound - gap_tol;
        Kv detail;
        detail("queries", game->queries())("dist_err", dist_err)("fstar_err", fstar_err)("sub_dist", cert.max_sub_dist)(
            "cosh_residual", cert.max_cosh_residual)("replay", cert.max_replay_error);

        Json inst;
        inst["params"] = params;
        inst["a"] = game->a();
        inst["xstar"] = to_json(fin.xstar.coords());
        inst["gaps"] = cert.gaps;
        inst["queries"] = Json::array();
        for (std::size_t k = 0; k < game->history().size(); ++k) {
          Json q = sample_json(game->history()[k]);
          q["k"] = k;
          q["chosen_i"] = game->selections()[k].i;
          q["chosen_s"] = game->selections()[k].s;
          q["margin"] = game->selections()[k].runner_up;
          inst["queries"].push_back(q);
        }

        if (smooth) {
          const auto& sg = static_cast<SmoothGame&>(*game);
          const double lambda = sg.lambda();
          // Sandwich of each answered envelope against its nonsmooth max.
          double sandwich_low = kInf, sandwich_high = kInf;
          const auto& parts = fin.nonsmooth->parts();
          for (int k = 0; k < game->queries(); ++k) {
            std::vector<std::pair<FnPtr, double>> pk(parts.begin(), parts.begin() + k + 1);
            const auto fk = fn_shifted_max(pk);
            const auto fl = fn_moreau(fk, sg.moreau_params());
            const HPoint& xk = game->history()[k].x;
            for (int j = 0; j < sandwich_samples; ++j) {
              const HPoint z = random_in_ball(rng, xk, 1.0);
              const double v = fk->value(z);
              const double vl = fl->value(z);
              sandwich_low = std::min(sandwich_low, vl - (v - lambda));
              sandwich_high = std::min(sandwich_high, v - vl);
            }
          }
          // Chord estimate of the gradient Lipschitz constant of the final envelope.
          double lip = 0.0;
          for (int k = 0; k < game->queries(); ++k) {
            const HPoint& xk = game->history()[k].x;
            for (int j = 0; j < lip_pairs; ++j) {
              const HPoint z1 = random_in_ball(rng, xk, 0.5);
              const HPoint z2 = random_tangent_point(rng, z1, lip_len);
              const OracleSample s1 = fin.f->eval(z1);
              const OracleSample s2 = fin.f->eval(z2);
              const HTangent moved = ptransport(z1, z2, s1.g);
              const HTangent diff = moved - s2.g;
              lip = std::max(lip, diff.norm() / dist(z1, z2));
            }
          }
          ok = ok && sandwich_low >= -1e-9 && sandwich_high >= -1e-9 && lip <= L + 1e-3;
          detail("lambda", lambda)("L", L)("sandwich_low", sandwich_low)("sandwich_high", sandwich_high)("chord_lipschitz",
                                                                                                          lip);
          inst["lipschitz"] = lip;
        }
        res.rows.push_back(make_row(kind, params, cfg.seed, params, cert.min_gap, bound, ok, detail.str(), timer.ms()));
        res.transcript["instances"].push_back(std::move(inst));
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------- worst instance

const char* rule_name(SubgradRule r) {
  switch (r) {
    case SubgradRule::Ladder:
      return "ladder";
    case SubgradRule::Region:
      return "region";
    default:
      return "default";
  }
}

RunResult run_polyak_worst(const ExperimentConfig& cfg) {
  const Json& p = cfg.params;
  const auto epss = get_list<double>(p, "eps", {0.15, 0.17});
  const auto rs = get_list<double>(p, "r", {10.0, 20.0});
  RunResult res;
  res.transcript["kind"] = "polyak-worst";
  res.transcript["instances"] = Json::array();
  for (double eps : epss) {
    for (double r : rs) {
      Timer timer;
      const std::string params = Kv()("eps", eps)("r", r).str();
      WorstInstance inst;
      try {
        inst = worst_build(eps, r);
      } catch (const DomainError& e) {
        throw ConfigError("polyak-worst " + params + ": " + e.what());
      } catch (const RangeError& e) {
        throw ConfigError("polyak-worst " + params + ": " + e.what());
      } catch (const GeometryError& e) {
        res.rows.push_back(make_row("polyak-worst", params, cfg.seed, params, kInf, 1e-6, false,
                                    std::string("error=") + e.what(), timer.ms()));
        continue;
      }
      const auto oracle = worst_oracle(inst);
      const int T = inst.d;
      Trace tr;
      std::string error;
      try {
        tr = polyak_sgd(*oracle, 0.0, HPoint::origin(T), r, T);
      } catch (const std::exception& e) {
        error = e.what();
      }
      double max_dist = 0.0, s_err = 0.0, step_err = 0.0, gap_err = 0.0, min_rk = kInf;
      std::map<std::string, int> rules;
      Json steps = Json::array();
      for (std::size_t k = 0; k < tr.samples.size(); ++k) {
        const OracleSample& s = tr.samples[k];
        const WorstEval we = oracle->eval_flagged(s.x);
        ++rules[rule_name(we.rule)];
        const double dk = dist(s.x, inst.y[k]);
        max_dist = std::max(max_dist, dk);
        gap_err = std::max(gap_err, std::abs(tr.gaps[k] - inst.radii[k]));
        min_rk = std::min(min_rk, inst.radii[k]);
        Json st = {{"k", k}, {"dist_to_ladder", dk}, {"gap", tr.gaps[k]}, {"r_k", inst.radii[k]}, {"rule", rule_name(we.rule)}};
        if (k < tr.polyak.size()) {
          s_err = std::max(s_err, std::abs(tr.polyak[k].s - inst.radii[k]));
          step_err = std::max(step_err, std::abs(tr.polyak[k].step_len - inst.deltas[k]));
          st["s"] = tr.polyak[k].s;
          st["step"] = tr.polyak[k].step_len;
          st["delta"] = inst.deltas[k];
        }
        steps.push_back(st);
      }
      const A2Report a2 = a2_check(inst, tr.samples);
      const bool ok = error.empty() && static_cast<int>(tr.samples.size()) == T &&
                      static_cast<int>(tr.polyak.size()) >= T && max_dist <= 1e-6 && s_err <= 1e-8 &&
                      step_err <= 1e-8 && gap_err <= 1e-6 && min_rk >= r / 2.0 &&
                      a2.a1_all && a2.a2_all;
      Kv detail;
      detail("T", T)("s_err", s_err)("step_err", step_err)("gap_err", gap_err)("min_r_k", min_rk)("a1", a2.a1_all)(
          "a2", a2.a2_all)("rules_ladder", rules["ladder"])("rules_region", rules["region"])("rules_default",
                                                                                          rules["default"]);
      if (!error.empty()) detail("error", error);
      res.rows.push_back(make_row("polyak-worst", params, cfg.seed, params, max_dist, 1e-6, ok, detail.str(), timer.ms()));
      res.transcript["instances"].push_back({{"params", params}, {"T", T}, {"steps", steps}});
    }
  }
  return res;
}

// ---------------------------------------------------------------- cutting planes

RunResult run_cut_game(const ExperimentConfig& cfg) {
  const Json& p = cfg.params;
  CutConfig cc;
  cc.d = get<int>(p, "d", 3);
  cc.r = get<double>(p, "r", 6.0);
  cc.eps = get<double>(p, "eps", 0.1);
  cc.n_normal_samples = get<int>(p, "n_normal_samples", 512);
  cc.max_rounds = get<int>(p, "max_rounds", 40);
  cc.packing_seed = get<std::uint64_t>(p, "packing_seed", cfg.seed);
  cc.packing_fail_cap = get<long>(p, "packing_fail_cap", cc.packing_fail_cap);
  cc.frontier_tries = get<int>(p, "frontier_tries", cc.frontier_tries);
  cc.parallel = get<bool>(p, "parallel", true);
  const int games = get<int>(p, "games", 50);
  const std::string player_name = get<std::string>(p, "player", "subgradient-walk");
  const double quarter_fraction = get<double>(p, "quarter_fraction", 0.9);
  const bool volume_check = get<bool>(p, "volume_check", true);
  const int volume_points = get<int>(p, "volume_points", 12);
  try {
    cc.validate();
    make_cut_player(player_name, 0);
  } catch (const Error& e) {
    throw ConfigError(std::string("cut-game: ") + e.what());
  }

  RunResult res;
  res.transcript["kind"] = "cut-game";
  res.transcript["rng"] = CounterRng::kName;

  if (volume_check) {
    for (int d = 3; d <= 8; ++d) {
      Timer timer;
      const double r0 = 4.0 * std::log(static_cast<double>(d));
      double worst_upper = 0.0, worst_lower = kInf;
      for (int i = 0; i < volume_points; ++i) {
        const double r = volume_points == 1 ? r0 : r0 + (20.0 - r0) * i / (volume_points - 1);
        const double v = volume_ball(d, r);
        worst_upper = std::max(worst_upper, v / volume_upper_bound(d, r));
        worst_lower = std::min(worst_lower, v / volume_lower_bound(d, r));
      }
      const bool ok = worst_upper <= 1.0 + 1e-6 && worst_lower >= 1.0 - 1e-6;
      const std::string params = Kv()("d", d)("r_min", r0)("r_max", 20.0)("points", volume_points).str();
      res.rows.push_back(make_row("cut-game", "volume d=" + std::to_string(d), cfg.seed, params, worst_upper, 1.0, ok,
                                  Kv()("min_ratio_to_lower", worst_lower).str(), timer.ms()));
    }
  }

  Timer ptimer;
  const auto packing = std::make_shared<const Packing>(packing_build(cc));
  const double min_sep = packing_min_distance(*packing);
  const double n0 = static_cast<double>(packing->centers.size());
  const bool pack_ok = min_sep >= packing->separation * (1.0 - 1e-12) && n0 * 10.0 >= packing->volume_estimate &&
                       n0 <= 10.0 * packing->volume_estimate;
  const std::string base = Kv()("d", cc.d)("r", cc.r)("eps", cc.effective_eps()).str();
  res.rows.push_back(make_row("cut-game", "packing", cc.packing_seed, base, n0, packing->volume_estimate, pack_ok,
                              Kv()("min_distance", min_sep)("separation", packing->separation)(
                                  "floor_estimate", packing->floor_estimate)("proposals", packing->proposals)(
                                  "frontier", packing->frontier_accepted)("uniform", packing->uniform_accepted)(
                                  "final_fail_run", packing->final_fail_run)
                                  .str(),
                              ptimer.ms()));
  res.transcript["packing"] = {{"size", packing->centers.size()},
                               {"separation", packing->separation},
                               {"volume_estimate", packing->volume_estimate},
                               {"floor_estimate", packing->floor_estimate}};

  long rounds_total = 0, quarter_ok = 0;
  res.transcript["games"] = Json::array();
  for (int gi = 0; gi < games; ++gi) {
    Timer timer;
    CutConfig gc = cc;
    gc.seed = cfg.seed + static_cast<std::uint64_t>(gi);
    auto player = make_cut_player(player_name, gc.seed);
    const CutTranscript tr = play_game(gc, *player, packing);
    for (const CutRound& rd : tr.rounds) {
      ++rounds_total;
      if (rd.quarter_ok) ++quarter_ok;
    }
    const bool ok = tr.all_consistent && (!tr.has_xstar || tr.xstar_replay_ok);
    const std::string params = Kv()("d", gc.d)("r", gc.r)("eps", tr.eps)("player", tr.player).str();
    res.rows.push_back(make_row("cut-game", "game " + std::to_string(gi), gc.seed, params, tr.rounds_survived,
                                tr.target_rounds, ok,
                                Kv()("quarter_law_violations", tr.quarter_law_violations)("exhausted", tr.exhausted)(
                                    "initial", tr.initial_candidates)("final",
                                                                      tr.rounds.empty() ? tr.initial_candidates
                                                                                        : tr.rounds.back().after)(
                                    "consistent", tr.all_consistent)("replay", tr.xstar_replay_ok)
                                    .str(),
                                timer.ms()));
    res.transcript["games"].push_back(cut_transcript_json(tr));
  }
  if (games > 0) {
    const double frac = rounds_total > 0 ? static_cast<double>(quarter_ok) / rounds_total : 0.0;
    res.rows.push_back(make_row("cut-game", "quarter-law", cfg.seed, base, frac, quarter_fraction,
                                rounds_total > 0 && frac >= quarter_fraction,
                                Kv()("rounds", rounds_total)("quarter_ok", quarter_ok).str(), 0.0));
  }
  return res;
}

// ---------------------------------------------------------------- interpolation

/// Data read off a positive combination of squared distances (mu = sum of
/// weights), keeping points whose gradient is at most mu/2.
InterpData zoo_sampled_data(CounterRng& rng, int d, int n) {
  const int m = 1 + static_cast<int>(rng.below(3));
  std::vector<std::pair<double, FnPtr>> terms;
  double mu = 0.0;
  const HPoint center = random_in_ball(rng, HPoint::origin(d), 1.0);
  for (int j = 0; j < m; ++j) {
    const double w = rng.uniform(0.5, 2.0);
    terms.emplace_back(w, fn_sqdist_point(random_in_ball(rng, center, 0.3)));
    mu += w;
  }
  const FnPtr f = fn_affine_sum(rng.uniform(-1.0, 1.0), terms);
  InterpData data;
  data.mu = mu;
  int guard = 0;
  while (static_cast<int>(data.items.size()) < n && guard++ < 100000) {
    const HPoint x = random_in_ball(rng, center, 1.0);
    const OracleSample s = f->eval(x);
    if (s.g.norm() <= 0.5 * mu) data.items.push_back(s);
  }
  return data;
}

RunResult run_interp(const ExperimentConfig& cfg) {
  const Json& p = cfg.params;
  const double th_lo = get<double>(p, "theta_min", 0.1);
  const double th_hi = get<double>(p, "theta_max", 1.4);
  const int th_n = get<int>(p, "theta_points", 14);
  const int n_suff = get<int>(p, "sufficient_instances", 20);
  const int n_items = get<int>(p, "sufficient_points", 6);
  const int n_geo = get<int>(p, "midpoint_geodesics", 100);
  const int n_triples = get<int>(p, "minimal_triples", 1000);
  const int d = get<int>(p, "d", 3);
  RunResult res;
  res.transcript["kind"] = "interp";
  res.transcript["obstructions"] = Json::array();
  for (int i = 0; i < th_n; ++i) {
    const double theta = th_n == 1 ? th_lo : th_lo + (th_hi - th_lo) * i / (th_n - 1);
    for (bool perp : {false, true}) {
      Timer timer;
      const Obstruction ob = obstruction_certificate(theta, perp);
      const NecessaryReport nec = check_necessary(ob.data);
      const std::string params = Kv()("theta", theta)("perpendicular", perp).str();
      res.rows.push_back(make_row("interp", "obstruction", cfg.seed, params, ob.lower, ob.upper, nec.pass && ob.valid(),
                                  Kv()("h", ob.h)("necessary", nec.pass)("slack", nec.slack).str(), timer.ms()));
      res.transcript["obstructions"].push_back({{"theta", theta}, {"perpendicular", perp}, {"data", interp_to_json(ob.data)}});
    }
  }
  for (int i = 0; i < n_suff; ++i) {
    Timer timer;
    CounterRng rng(cfg.seed, 0x73756666ull + static_cast<std::uint64_t>(i));
    const InterpData data = zoo_sampled_data(rng, d, n_items);
    const auto out = construct_sufficient(data, 100, cfg.seed + static_cast<std::uint64_t>(i));
    const std::string params = Kv()("d", d)("points", static_cast<int>(data.items.size()))("mu", data.mu).str();
    if (const auto* na = std::get_if<NotApplicable>(&out)) {
      res.rows.push_back(make_row("interp", "sufficient " + std::to_string(i), cfg.seed, params, kInf, 1e-9, false,
                                  "not_applicable=" + na->reason, timer.ms()));
      continue;
    }
    const Interpolant& ip = std::get<Interpolant>(out);
    double mid = kInf;
    for (int j = 0; j < n_geo; ++j) {
      const HPoint a = random_in_ball(rng, data.items[0].x, 2.0);
      const HPoint b = random_in_ball(rng, data.items[0].x, 2.0);
      mid = std::min(mid, midpoint_slack(*ip.f, a, b, 0.5 * data.mu));
    }
    res.rows.push_back(make_row("interp", "sufficient " + std::to_string(i), cfg.seed, params, ip.max_value_error, 1e-9,
                                ip.verified && mid >= -1e-9,
                                Kv()("subgrad_slack", ip.min_subgrad_slack)("midpoint_slack", mid).str(), timer.ms()));
    res.transcript["sufficient"].push_back(interp_to_json(data));
  }
  if (n_triples > 0) {
    Timer timer;
    CounterRng rng(cfg.seed, 0x6d696e6dull);
    double worst = 0.0;
    int certified = 0;
    for (int i = 0; i < n_triples; ++i) {
      const HPoint y = random_in_ball(rng, HPoint::origin(d), 2.0);
      const HTangent g = random_unit_tangent(rng, y) * rng.uniform(0.0, 3.0);
      const HPoint x = random_in_ball(rng, y, 3.0);
      const MinimalFunction mf = minimal_function(rng.uniform(-2.0, 2.0), y, g, x, 20, static_cast<std::uint64_t>(i));
      const double err = std::abs(mf.value_at_x - mf.target) / std::max(1.0, std::abs(mf.target));
      worst = std::max(worst, err);
      if (mf.certified) ++certified;
    }
    res.rows.push_back(make_row("interp", "minimal", cfg.seed, Kv()("d", d)("triples", n_triples).str(), worst, 1e-8,
                                worst <= 1e-8 && certified == n_triples, Kv()("certified", certified).str(),
                                timer.ms()));
  }
  return res;
}

// ---------------------------------------------------------------- zoo validation

struct SuiteStats {
  double worst = 0.0;  // largest violation (positive = bad)
  int checks = 0;
  void add(double violation) {
    worst = std::max(worst, violation);
    ++checks;
  }
};

void oracle_suite(RunResult& res, const ExperimentConfig& cfg, const std::string& name,
                  const std::function<FnPtr(CounterRng&, int)>& make, bool smooth, bool gconvex, int d, int n) {
  Timer timer;
  CounterRng rng(cfg.seed, std::hash<std::string>{}(name) & 0xffffffffull);
  SuiteStats fd, sub, mid, lip;
  for (int i = 0; i < n; ++i) {
    const FnPtr f = make(rng, d);
    const HPoint x = random_in_ball(rng, HPoint::origin(d), 2.0);
    const HPoint y = random_in_ball(rng, HPoint::origin(d), 2.0);
    const OracleSample s = f->eval(x);
    if (smooth) {
      const HTangent v = random_unit_tangent(rng, x);
      const double h = 1e-5;
      const double fp = f->value(exp_map(v * h));
      const double fm = f->value(exp_map(v * -h));
      const double fdv = (fp - fm) / (2.0 * h);
      fd.add(std::abs(fdv - s.g.inner(v)) / std::max(1.0, s.g.norm()) - 1e-5);
    }
    if (gconvex) {
      sub.add(s.F + s.g.inner(log_map(x, y)) - f->value(y) - 1e-9);
      mid.add(-midpoint_slack(*f, x, y, 0.0) - 1e-9);
    }
    if (f->meta().lipschitz) lip.add(std::abs(f->value(x) - f->value(y)) - *f->meta().lipschitz * dist(x, y) - 1e-9);
  }
  const double worst = std::max({fd.worst, sub.worst, mid.worst, lip.worst});
  res.rows.push_back(make_row("zoo-validate", "oracle " + name, cfg.seed, Kv()("d", d)("instances", n).str(), worst, 0.0,
                              worst <= 0.0,
                              Kv()("fd", fd.worst)("subgradient", sub.worst)("midpoint", mid.worst)("lipschitz",
                                                                                                  lip.worst)
                                  .str(),
                              timer.ms()));
}

void manifold_suite(RunResult& res, const ExperimentConfig& cfg, int n) {
  for (int d : {2, 5, 10}) {
    Timer timer;
    CounterRng rng(cfg.seed, 0x6d616e00ull + static_cast<std::uint64_t>(d));
    double explog = 0.0, distv = 0.0, iso = 0.0, span = 0.0;
    for (int i = 0; i < n; ++i) {
      const HPoint x = random_in_ball(rng, HPoint::origin(d), 2.0);
      const HTangent v = random_unit_tangent(rng, x) * rng.uniform(0.0, 10.0);
      const HPoint y = exp_map(v);
      const HTangent back = log_map(x, y);
      explog = std::max(explog, (back - v).norm());
      distv = std::max(distv, std::abs(dist(x, y) - v.norm()));

      const HPoint z = random_in_ball(rng, x, 5.0);
      const HTangent u = random_unit_tangent(rng, x) * rng.uniform(0.0, 2.0);
      const HTangent w = random_unit_tangent(rng, x) * rng.uniform(0.0, 2.0);
      const HTangent pu = ptransport(x, z, u);
      const HTangent pw = ptransport(x, z, w);
      iso = std::max(iso, std::abs(pu.inner(pw) - u.inner(w)));

      const HTangent e = random_unit_tangent(rng, x);
      const TotallyGeodesicSub S = gspan({x}, {e});
      for (int k = 0; k <= 10; ++k) {
        const double t = -5.0 + k;
        span = std::max(span, S.residual(exp_map(e * t).coords()));
      }
    }
    const bool ok = explog <= 1e-8 && distv <= 1e-9 && iso <= 1e-9 && span <= 1e-9;
    res.rows.push_back(make_row("zoo-validate", "manifold d=" + std::to_string(d), cfg.seed,
                                Kv()("d", d)("cases", n).str(), std::max({explog / 1e-8, distv / 1e-9, iso / 1e-9, span / 1e-9}),
                                1.0, ok,
                                Kv()("exp_log", explog)("dist", distv)("transport", iso)("gspan", span).str(),
                                timer.ms()));
  }
}

void polyak_suite(RunResult& res, const ExperimentConfig& cfg, int instances) {
  for (int T : {10, 100}) {
    Timer timer;
    double worst_ratio = 0.0;
    double radius_violation = 0.0;
    bool ok = true;
    for (int i = 0; i < instances; ++i) {
      CounterRng rng(cfg.seed + static_cast<std::uint64_t>(i), 0x706f6c79ull);
      const MaxDistanceInstance inst = random_max_distance(3, 4, 3.0, rng);
      const HPoint x0 = HPoint::origin(3);
      const double r = dist(x0, inst.xstar);
      const Trace tr = polyak_sgd(*inst.f, inst.fstar, x0, r, T);
      double best = kInf;
      for (double g : tr.gaps) best = std::min(best, g);
      const double guarantee = polyak_guarantee(r, inst.lipschitz, T);
      worst_ratio = std::max(worst_ratio, best * best / guarantee);
      for (std::size_t k = 0; k < tr.polyak.size(); ++k)
        radius_violation = std::max(radius_violation, dist(tr.samples[k].x, inst.xstar) - tr.polyak[k].s);
      ok = ok && best * best <= guarantee;
    }
    ok = ok && radius_violation <= 1e-6;
    res.rows.push_back(make_row("zoo-validate", "polyak-guarantee T=" + std::to_string(T), cfg.seed,
                                Kv()("T", T)("instances", instances).str(), worst_ratio, 1.0, ok,
                                Kv()("radius_violation", radius_violation).str(), timer.ms()));
  }
}

void scalar_suite(RunResult& res, const ExperimentConfig& cfg) {
  for (double R : {1.0, 10.0}) {
    Timer timer;
    double v1 = kInf, v2 = -kInf, v3 = kInf, v4 = -kInf;
    const double lo = R * R / 2.0;
    const double ratio = 2e6;
    for (int i = 1; i <= 1000; ++i) {
      const double D = lo * std::pow(ratio, i / 1000.0);
      const URLemmas l = u_R_lemmas(D, R);
      v1 = std::min(v1, l.first);
      v2 = std::max(v2, l.second);
      v3 = std::min(v3, l.third);
      v4 = std::max(v4, l.fourth);
    }
    const bool ok = v1 >= 0.0 && v2 <= 0.0 && v3 > 0.0 && v4 <= 0.0;
    res.rows.push_back(make_row("zoo-validate", "u_R R=" + fmt_double(R), cfg.seed, Kv()("R", R)("points", 1000).str(),
                                v1, 0.0, ok, Kv()("min_first", v1)("max_second", v2)("min_third", v3)("max_fourth", v4).str(),
                                timer.ms()));
  }
  {
    Timer timer;
    double worst = -kInf;
    for (int i = 0; i <= 1000; ++i) {
      const double t = 30.0 * i / 1000.0;
      worst = std::max(worst, zeta(t) - (1.0 + t));
    }
    res.rows.push_back(make_row("zoo-validate", "zeta", cfg.seed, Kv()("t_max", 30.0)("points", 1001).str(), worst, 0.0,
                                worst <= 0.0, "", timer.ms()));
  }
  {
    Timer timer;
    double worst = -kInf;
    bool ok = true;
    for (int T : {4, 8}) {
      for (double r : {1.0, 2.0}) {
        auto game = std::make_shared<SmoothGame>(T, r);
        GameOracle oracle(game);
        polyak_sgd(oracle, -game->a(), game->xref(), r, T);
        const GameFinal fin = game->finalize();
        const GapBoundReport rep = gap_bound_check(*fin.f, game->xref(), r, game->L(), fin.fstar);
        worst = std::max(worst, rep.gap / rep.bound);
        ok = ok && rep.holds;
      }
    }
    CounterRng rng(cfg.seed, 0x73716400ull);
    for (int i = 0; i < 20; ++i) {
      const double r = rng.uniform(0.1, 10.0);
      const HPoint xref = HPoint::origin(3);
      const HPoint z = exp_map(random_unit_tangent(rng, xref) * r);
      const GapBoundReport rep = gap_bound_check(*fn_sqdist_point(z), xref, r, zeta(r), 0.0);
      worst = std::max(worst, rep.gap / rep.bound);
      ok = ok && rep.holds;
    }
    res.rows.push_back(make_row("zoo-validate", "gap-bound", cfg.seed, Kv()("smooth_games", 4)("sqdist", 20).str(), worst,
                                1.0, ok, "", timer.ms()));
  }
}

void moreau_suite(RunResult& res, const ExperimentConfig& cfg, int n) {
  Timer timer;
  CounterRng rng(cfg.seed, 0x6d6f7265ull);
  double low = kInf, high = kInf;
  const double lambda = 0.1;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<FnPtr, double>> parts;
    for (int j = 0; j < 3; ++j) parts.emplace_back(fn_dist_point(random_in_ball(rng, HPoint::origin(3), 2.0)), rng.uniform(0.0, 1.0));
    const auto f = fn_shifted_max(parts);
    const auto fl = fn_moreau(f, {lambda, 1e-10, 10000});
    const HPoint x = random_in_ball(rng, HPoint::origin(3), 2.0);
    const double v = f->value(x);
    const double vl = fl->value(x);
    low = std::min(low, vl - (v - lambda));
    high = std::min(high, v - vl);
  }
  res.rows.push_back(make_row("zoo-validate", "moreau-sandwich", cfg.seed, Kv()("lambda", lambda)("instances", n).str(),
                              std::min(low, high), -1e-9, low >= -1e-9 && high >= -1e-9,
                              Kv()("lower_slack", low)("upper_slack", high).str(), timer.ms()));
}

RunResult run_zoo_validate(const ExperimentConfig& cfg) {
  const Json& p = cfg.params;
  const auto suites = get_list<std::string>(p, "suites", {"oracles", "moreau", "manifold", "polyak", "scalar"});
  const int n = get<int>(p, "samples", 200);
  const int d = get<int>(p, "d", 3);
  RunResult res;
  res.transcript["kind"] = "zoo-validate";
  for (const std::string& s : suites) {
    if (s == "oracles") {
      auto point = [](CounterRng& rng, int dd) { return random_in_ball(rng, HPoint::origin(dd), 2.0); };
      oracle_suite(res, cfg, "dist_point", [&](CounterRng& rng, int dd) { return fn_dist_point(point(rng, dd)); }, true,
                   true, d, n);
      oracle_suite(res, cfg, "sqdist_point", [&](CounterRng& rng, int dd) { return fn_sqdist_point(point(rng, dd)); },
                   true, true, d, n);
      oracle_suite(
          res, cfg, "dist_sub",
          [&](CounterRng& rng, int dd) {
            const HPoint a = point(rng, dd);
            return fn_dist_sub(gspan({a}, {random_unit_tangent(rng, a)}), 0.0);
          },
          true, true, d, n);
      oracle_suite(
          res, cfg, "shifted_max",
          [&](CounterRng& rng, int dd) {
            std::vector<std::pair<FnPtr, double>> parts;
            for (int j = 0; j < 3; ++j) parts.emplace_back(fn_dist_point(point(rng, dd)), rng.uniform(0.0, 1.0));
            return std::static_pointer_cast<const FnOracle>(fn_shifted_max(parts));
          },
          false, true, d, n);
      oracle_suite(
          res, cfg, "affine_sum",
          [&](CounterRng& rng, int dd) {
            return fn_affine_sum(rng.uniform(-1.0, 1.0), {{rng.uniform(0.1, 2.0), fn_sqdist_point(point(rng, dd))},
                                                          {rng.uniform(0.1, 2.0), fn_dist_point(point(rng, dd))}});
          },
          true, true, d, n);
      oracle_suite(
          res, cfg, "pseudo_affine",
          [&](CounterRng& rng, int dd) {
            const HPoint a = point(rng, dd);
            return fn_pseudo_affine(random_unit_tangent(rng, a) * rng.uniform(0.0, 2.0));
          },
          true, false, d, n);
    } else if (s == "moreau") {
      moreau_suite(res, cfg, std::min(n, 100));
    } else if (s == "manifold") {
      manifold_suite(res, cfg, get<int>(p, "manifold_cases", 1000));
    } else if (s == "polyak") {
      polyak_suite(res, cfg, get<int>(p, "polyak_instances", 20));
    } else if (s == "scalar") {
      scalar_suite(res, cfg);
    } else {
      throw ConfigError("unknown zoo-validate suite: " + s);
    }
  }
  return res;
}

}  // namespace

bool RunResult::pass() const { return first_failure() == nullptr; }

const Row* RunResult::first_failure() const {
  for (const Row& r : rows)
    if (!r.pass) return &r;
  return nullptr;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  c.kind = get<std::string>(j, "kind", "");
  c.seed = get<std::uint64_t>(j, "seed", 0);
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("params must be an object");
    c.params = j.at("params");
  } else {
    c.params = j;
    c.params.erase("kind");
    c.params.erase("seed");
    c.params.erase("grid");
  }
  if (!c.kind.empty() && std::find(kKinds.begin(), kKinds.end(), c.kind) == kKinds.end())
    throw ConfigError("unknown kind: " + c.kind);
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

std::string csv_header(bool with_runtime) {
  std::string h = "kind,instance,seed,params,measured,bound,pass,detail";
  if (with_runtime) h += ",runtime_ms";
  return h;
}

std::string csv_row(const Row& r, bool with_runtime) {
  std::string s = csv_field(r.kind) + "," + csv_field(r.instance) + "," + std::to_string(r.seed) + "," +
                  csv_field(r.params) + "," + fmt_double(r.measured) + "," + fmt_double(r.bound) + "," +
                  (r.pass ? "pass" : "fail") + "," + csv_field(r.detail);
  if (with_runtime) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", r.runtime_ms);
    s += std::string(",") + buf;
  }
  return s;
}

std::string to_csv(const std::vector<Row>& rows, bool with_runtime) {
  std::string out = csv_header(with_runtime) + "\n";
  for (const Row& r : rows) out += csv_row(r, with_runtime) + "\n";
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.kind == "lb-nonsmooth") return run_lb(cfg, false);
  if (cfg.kind == "lb-smooth") return run_lb(cfg, true);
  if (cfg.kind == "polyak-worst") return run_polyak_worst(cfg);
  if (cfg.kind == "cut-game") return run_cut_game(cfg);
  if (cfg.kind == "interp") return run_interp(cfg);
  if (cfg.kind == "zoo-validate") return run_zoo_validate(cfg);
  throw ConfigError("unknown kind: " + cfg.kind);
}

RunResult sweep(const ExperimentConfig& base, const Json& grid) {
  if (!grid.is_object()) throw ConfigError("grid must be an object of value lists");
  std::vector<std::string> keys;
  std::vector<std::vector<Json>> values;
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    if (!it.value().is_array()) throw ConfigError("grid entry '" + it.key() + "' must be a list");
    keys.push_back(it.key());
    values.emplace_back(it.value().begin(), it.value().end());
  }
  RunResult out;
  out.transcript["cells"] = Json::array();
  for (const auto& v : values)
    if (v.empty()) return out;
  std::vector<std::size_t> idx(keys.size(), 0);
  for (;;) {
    ExperimentConfig cell = base;
    Json assigned = Json::object();
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (keys[k] == "seed") {
        cell.seed = values[k][idx[k]].get<std::uint64_t>();
      } else {
        cell.params[keys[k]] = values[k][idx[k]];
      }
      assigned[keys[k]] = values[k][idx[k]];
    }
    RunResult r = run_experiment(cell);
    out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
    out.transcript["cells"].push_back({{"cell", assigned}, {"transcript", std::move(r.transcript)}});
    std::size_t k = keys.size();
    while (k > 0) {
      --k;
      if (++idx[k] < values[k].size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (keys.empty()) return out;
  }
}

HPoint random_in_ball(CounterRng& rng, const HPoint& center, double radius) {
  const int d = center.dim();
  const HPoint o = HPoint::origin(d);
  const HPoint q = uniform_in_ball(rng, d, radius);
  if (dist(o, center) == 0.0) return q;
  const HTangent v = ptransport(o, center, log_map(o, q));
  return exp_map(v);
}

MaxDistanceInstance random_max_distance(int d, int pieces, double spread, CounterRng& rng) {
  if (pieces < 2) throw DomainError("max-of-distance instance needs at least two pieces");
  MaxDistanceInstance inst;
  inst.xstar = random_in_ball(rng, HPoint::origin(d), spread);
  std::vector<HTangent> dirs;
  HTangent sum = HTangent::zero(inst.xstar);
  for (int i = 0; i + 1 < pieces; ++i) {
    dirs.push_back(random_unit_tangent(rng, inst.xstar));
    sum = sum + dirs.back();
  }
  const double sn = sum.norm();
  dirs.push_back(sn > 1e-8 ? sum * (-1.0 / sn) : dirs.front() * -1.0);
  std::vector<std::pair<FnPtr, double>> parts;
  for (const HTangent& u : dirs) {
    const double rho = rng.uniform(0.5, 2.0);
    parts.emplace_back(fn_dist_point(exp_map(u * rho)), rho);
  }
  inst.f = fn_shifted_max(std::move(parts));
  return inst;
}

}  // namespace hgc
