#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypergconv/cutting_planes.hpp"
#include "hypergconv/errors.hpp"
#include "test_util.hpp"

using namespace hgc;

namespace {

// int_0^r sinh^n by the reduction formula
// I_n = sinh^{n-1} cosh / n - (n-1)/n I_{n-2}, I_0 = r, I_1 = cosh r - 1.
double sinh_power_integral(int n, double r) {
  if (n == 0) return r;
  if (n == 1) return std::cosh(r) - 1.0;
  return std::pow(std::sinh(r), n - 1) * std::cosh(r) / n - (n - 1.0) / n * sinh_power_integral(n - 2, r);
}

CutConfig small_config(std::uint64_t seed) {
  CutConfig c;
  c.d = 3;
  c.r = 3.0;
  c.eps = 0.05;
  c.n_normal_samples = 128;
  c.seed = seed;
  c.packing_seed = 11;
  c.max_rounds = 40;
  return c;
}

std::shared_ptr<const Packing> small_packing() {
  static const auto p = std::make_shared<const Packing>(packing_build(small_config(0)));
  return p;
}

}  // namespace

TEST(Volume, SphereArea) {
  EXPECT_NEAR(sphere_area(2), 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 4.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_area(4), 2.0 * std::numbers::pi * std::numbers::pi, 1e-13);
}

TEST(Volume, MatchesReductionFormula) {
  // The recursion cancels badly for small r, so it is used from r = 1 on.
  for (int d : {2, 3, 4, 5, 8}) {
    for (double r : {1.0, 3.0, 6.0, 10.0}) {
      const double want = sphere_area(d) * sinh_power_integral(d - 1, r);
      EXPECT_NEAR(volume_ball(d, r) / want, 1.0, 1e-10) << d << " " << r;
    }
  }
}

TEST(Volume, SmallRadius) {
  // int_0^0.1 sinh^{d-1}, 40-digit quadrature in mpmath.
  const std::pair<int, double> ref[] = {
      {4, 2.508346888567451670418587846644527489056e-5},
      {5, 2.009546064487736048325558022281726036427e-6},
      {8, 1.261720297627529786850840055840437973862e-9}};
  for (const auto& [d, v] : ref) EXPECT_NEAR(volume_ball(d, 0.1) / (sphere_area(d) * v), 1.0, 1e-12) << d;
}

TEST(Volume, ClosedFormBounds) {
  for (int d : {3, 4, 6, 10}) {
    for (double r = 0.5; r <= 20.0; r += 0.5) {
      EXPECT_LE(volume_ball(d, r), volume_upper_bound(d, r) * (1.0 + 1e-12));
      EXPECT_DOUBLE_EQ(volume_lower_bound(d, r), 0.25 * volume_upper_bound(d, r));
      if (r >= 4.0 * std::log(d)) EXPECT_GE(volume_ball(d, r), volume_lower_bound(d, r));
    }
  }
}

TEST(UniformInBall, RadialLaw) {
  CounterRng rng(1);
  const int d = 3, n = 20000;
  const double R = 3.0;
  std::vector<double> rad;
  for (int i = 0; i < n; ++i) rad.push_back(dist(HPoint::origin(d), uniform_in_ball(rng, d, R)));
  std::sort(rad.begin(), rad.end());
  EXPECT_LE(rad.back(), R + 1e-12);
  // Kolmogorov distance against V(rho) / V(R); the 0.1% critical value is 1.95 / sqrt(n).
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = volume_ball(d, rad[i]) / volume_ball(d, R);
    ks = std::max({ks, std::abs(F - (i + 1.0) / n), std::abs(F - static_cast<double>(i) / n)});
  }
  EXPECT_LE(ks, 1.95 / std::sqrt(static_cast<double>(n)));
}

TEST(CutConfig, Validation) {
  CutConfig c;
  EXPECT_NEAR(c.effective_eps(), 1.0 / 640.0, 1e-15);
  EXPECT_NO_THROW(c.validate());
  c.d = 2;
  EXPECT_THROW(c.validate(), DomainError);
  c = CutConfig{};
  c.r = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = CutConfig{};
  c.eps = 1.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = CutConfig{};
  c.n_normal_samples = 0;
  EXPECT_THROW(c.validate(), DomainError);
  EXPECT_THROW(make_cut_player("nope", 1), DomainError);
}

TEST(Packing, SeparatedInsideAndNearlyMaximal) {
  const auto p = small_packing();
  const CutConfig c = small_config(0);
  const double sep = 2.0 * c.eps * c.r;
  ASSERT_GT(p->centers.size(), 10u);
  EXPECT_DOUBLE_EQ(p->separation, sep);
  double brute = 1e300;
  for (std::size_t i = 0; i < p->centers.size(); ++i) {
    EXPECT_LE(dist(HPoint::origin(3), p->centers[i]), p->radius + 1e-12);
    EXPECT_EQ((p->coords.col(i) - p->centers[i].coords()).norm(), 0.0);
    for (std::size_t j = 0; j < i; ++j) brute = std::min(brute, dist(p->centers[i], p->centers[j]));
  }
  EXPECT_GE(brute, sep);
  EXPECT_NEAR(packing_min_distance(*p), brute, 1e-9);
  // Uniform probes: almost every point of the ball is within sep of a center.
  CounterRng rng(2);
  int uncovered = 0;
  const int probes = 2000;
  for (int i = 0; i < probes; ++i) {
    const HPoint q = uniform_in_ball(rng, 3, p->radius);
    bool near = false;
    for (const HPoint& c0 : p->centers) near = near || dist(q, c0) < sep;
    uncovered += near ? 0 : 1;
  }
  EXPECT_LE(uncovered, probes / 100);
}

TEST(Packing, Deterministic) {
  CutConfig c = small_config(0);
  c.r = 2.0;
  const Packing a = packing_build(c), b = packing_build(c);
  ASSERT_EQ(a.centers.size(), b.centers.size());
  EXPECT_EQ((a.coords - b.coords).norm(), 0.0);
  c.packing_seed = 12;
  const Packing e = packing_build(c);
  EXPECT_TRUE(e.centers.size() != a.centers.size() || (e.coords - a.coords).norm() > 0.0);
}

TEST(CutGame, RoundsAreConsistentAndReplay) {
  for (const std::string name : {"repeat-xref", "random-query", "subgradient-walk"}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const CutConfig cfg = small_config(seed);
      auto player = make_cut_player(name, seed);
      const CutTranscript t = play_game(cfg, *player, small_packing());
      EXPECT_EQ(t.player, name);
      EXPECT_EQ(t.initial_candidates, static_cast<int>(small_packing()->centers.size()));
      EXPECT_TRUE(t.all_consistent);
      EXPECT_EQ(t.quarter_law_violations, 0);
      int before = t.initial_candidates;
      for (const CutRound& rd : t.rounds) {
        EXPECT_EQ(rd.before, before);
        EXPECT_LE(rd.after, rd.before);
        EXPECT_GE(4 * rd.after, rd.before);
        EXPECT_NEAR(rd.g.norm(), 1.0, 1e-9);
        before = rd.after;
      }
      ASSERT_TRUE(t.has_xstar);
      EXPECT_TRUE(t.xstar_replay_ok);
      // Independent replay: x* on the far side of every answered hyperplane
      // and more than eps r away from it.
      const double er = cfg.eps * cfg.r;
      for (const CutRound& rd : t.rounds) {
        EXPECT_LE(rd.g.inner(log_map(rd.x, t.xstar)), 1e-9);
        const TotallyGeodesicSub plane = TotallyGeodesicSub::from_normals(rd.x, {rd.g.vec});
        EXPECT_GT(sub_dist(t.xstar, plane).dist, er);
      }
    }
  }
}

TEST(CutGame, StateRejectsWrongDimension) {
  CutGameState st(small_config(1), small_packing());
  EXPECT_THROW(st.respond(HPoint::origin(4)), DimensionError);
  const CutRespond r = st.respond(HPoint::origin(3));
  EXPECT_FALSE(r.exhausted);
  EXPECT_EQ(st.round(), 1);
  for (int idx : st.candidates()) EXPECT_TRUE(st.consistent(st.candidate(idx)));
}

TEST(CutGame, DeterministicInSeed) {
  const CutConfig cfg = small_config(5);
  auto p1 = make_cut_player("random-query", 5), p2 = make_cut_player("random-query", 5);
  const CutTranscript a = play_game(cfg, *p1, small_packing()), b = play_game(cfg, *p2, small_packing());
  ASSERT_EQ(a.rounds.size(), b.rounds.size());
  for (std::size_t k = 0; k < a.rounds.size(); ++k) {
    EXPECT_EQ(a.rounds[k].after, b.rounds[k].after);
    EXPECT_EQ(a.rounds[k].normal_index, b.rounds[k].normal_index);
    EXPECT_EQ((a.rounds[k].g.vec - b.rounds[k].g.vec).norm(), 0.0);
  }
}

TEST(CutGame, SerialAndParallelScoringAgree) {
  CutConfig a = small_config(7), b = small_config(7);
  a.parallel = false;
  b.parallel = true;
  auto p1 = make_cut_player("subgradient-walk", 7), p2 = make_cut_player("subgradient-walk", 7);
  const CutTranscript ta = play_game(a, *p1, small_packing()), tb = play_game(b, *p2, small_packing());
  ASSERT_EQ(ta.rounds.size(), tb.rounds.size());
  for (std::size_t k = 0; k < ta.rounds.size(); ++k) EXPECT_EQ(ta.rounds[k].after, tb.rounds[k].after);
}
