#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "hypergconv/errors.hpp"
#include "hypergconv/harness.hpp"
#include "hypergconv/resisting.hpp"
#include "hypergconv/solvers.hpp"
#include "hypergconv/transcript.hpp"
#include "hypergconv/worst.hpp"
#include "test_util.hpp"

using namespace hgc;
using hgc::testing::minkowski;
using hgc::testing::rand_tangent;

namespace {

// Plays T random queries in B(x_ref, r) and keeps every intermediate f_k.
std::vector<std::shared_ptr<const ShiftedMax>> play_random(NonsmoothGame& g, CounterRng& rng) {
  std::vector<std::shared_ptr<const ShiftedMax>> fks;
  for (int k = 0; k < g.T(); ++k) {
    g.respond(random_in_ball(rng, g.xref(), g.r()));
    fks.push_back(g.current());
  }
  return fks;
}

}  // namespace

TEST(NonsmoothGame, Construction) {
  EXPECT_THROW(NonsmoothGame(1, 1.0), DomainError);
  EXPECT_THROW(NonsmoothGame(4, 31.0), RangeError);
  EXPECT_THROW(NonsmoothGame(4, 0.0), DomainError);
  const NonsmoothGame g(4, 1.0);
  // atanh(tanh(1) / 2) from Python.
  EXPECT_NEAR(g.a(), 0.40099158142700686, 1e-12);
  EXPECT_EQ(g.delta(), g.a() / 8.0);
  EXPECT_EQ(g.d(), 4);
  for (int i = 1; i <= 4; ++i)
    for (int s : {+1, -1}) {
      EXPECT_NEAR(sub_dist(g.xref(), g.sub(i, s)).dist, g.a(), 1e-12);
      EXPECT_NEAR(dist(g.xref(), g.z(i, s)), g.a(), 1e-12);
    }
}

TEST(NonsmoothGame, FirstQueryAtReference) {
  NonsmoothGame g(5, 2.0);
  const OracleSample s = g.respond(g.xref());
  EXPECT_NEAR(s.F, 0.0, 1e-12);
  EXPECT_NEAR(s.g.norm(), 1.0, 1e-12);
}

TEST(NonsmoothGame, BudgetAndDistinctIndices) {
  CounterRng rng(1);
  NonsmoothGame g(6, 2.0);
  play_random(g, rng);
  EXPECT_THROW(g.respond(g.xref()), StateError);
  std::set<int> seen;
  for (const Selection& s : g.selections()) {
    EXPECT_TRUE(seen.insert(s.i).second);
    EXPECT_GE(s.h, -1e-9);
    EXPECT_TRUE(s.s == 1 || s.s == -1);
  }
  EXPECT_LE(g.delta() * (g.T() - 1), g.a() / 2.0);
}

TEST(NonsmoothGame, FinalizeCertificates) {
  CounterRng rng(2);
  for (int T : {4, 8, 16}) {
    for (double r : {1.0, 2.0, 5.0}) {
      NonsmoothGame g(T, r);
      play_random(g, rng);
      const GameFinal fin = g.finalize();
      const GameCertificate c = certify(g, fin, g.history(), nonsmooth_gap_bound(r, T));
      EXPECT_NEAR(c.dist_xref_xstar, r, 1e-9);
      EXPECT_NEAR(c.f_xstar, -g.a(), 1e-8);
      EXPECT_EQ(c.fstar, -g.a());
      EXPECT_LE(c.max_sub_dist, 1e-8);
      EXPECT_LE(c.max_cosh_residual, 1e-9 * std::cosh(r));
      EXPECT_GE(c.min_h, -1e-9);
      EXPECT_LE(c.max_replay_error, 1e-9);
      for (double gap : c.gaps) EXPECT_GE(gap, c.bound - 1e-9);
    }
  }
}

TEST(NonsmoothGame, CertificatesAgainstPolyak) {
  for (int T : {4, 8, 16}) {
    for (double r : {1.0, 2.0, 5.0}) {
      auto g = std::make_shared<NonsmoothGame>(T, r);
      const GameOracle oracle(g);
      const Trace tr = polyak_sgd(oracle, -g->a(), g->xref(), r, T);
      const GameFinal fin = g->finalize();
      const GameCertificate c = certify(*g, fin, g->history(), nonsmooth_gap_bound(r, T));
      EXPECT_EQ(g->queries(), static_cast<int>(tr.samples.size()));
      for (double gap : c.gaps) EXPECT_GE(gap, c.bound - 1e-9);
      EXPECT_LE(c.max_replay_error, 1e-9);
    }
  }
}

TEST(NonsmoothGame, FinalFunctionIsLocallyEachStage) {
  CounterRng rng(3);
  NonsmoothGame g(6, 2.0);
  const auto fks = play_random(g, rng);
  const GameFinal fin = g.finalize();
  for (int k = 0; k < g.T(); ++k) {
    const HPoint& xk = g.history()[k].x;
    for (int j = 0; j < 100; ++j) {
      const HPoint y = exp_map(rand_tangent(rng, xk, 0.5 * g.delta() * rng.uniform()));
      EXPECT_NEAR(fin.nonsmooth->value(y), fks[k]->value(y), 1e-12);
    }
  }
}

TEST(NonsmoothGame, OracleKeepsAnsweringAfterBudget) {
  CounterRng rng(4);
  auto g = std::make_shared<NonsmoothGame>(3, 1.0);
  const GameOracle o(g);
  for (int k = 0; k < 3; ++k) o.eval(random_in_ball(rng, g->xref(), 1.0));
  const HPoint x = random_in_ball(rng, g->xref(), 1.0);
  const OracleSample late = o.eval(x);
  EXPECT_EQ(late.F, g->finalize().f->value(x));
  EXPECT_EQ(g->queries(), 3);
}

TEST(NonsmoothGame, FinalizePadsUnusedDirections) {
  NonsmoothGame g(5, 2.0);
  g.respond(g.xref());
  const GameFinal fin = g.finalize();
  EXPECT_EQ(fin.chosen.size(), 5u);
  EXPECT_NEAR(dist(g.xref(), fin.xstar), 2.0, 1e-9);
  EXPECT_NEAR(fin.f->value(fin.xstar), -g.a(), 1e-8);
}

TEST(NonsmoothGame, JsonlTranscript) {
  CounterRng rng(5);
  NonsmoothGame g(4, 1.0);
  play_random(g, rng);
  std::ostringstream os;
  write_game_jsonl(os, g);
  std::istringstream is(os.str());
  std::string line;
  int k = 0;
  while (std::getline(is, line)) {
    const Json j = Json::parse(line);
    EXPECT_EQ(j.at("k").get<int>(), k);
    EXPECT_EQ(j.at("x").size(), 5u);
    EXPECT_EQ(j.at("g").size(), 5u);
    EXPECT_EQ(j.at("F").get<double>(), g.history()[k].F);
    EXPECT_EQ(j.at("chosen_i").get<int>(), g.selections()[k].i);
    EXPECT_TRUE(j.at("margins").contains("h"));
    ++k;
  }
  EXPECT_EQ(k, 4);
}

TEST(SmoothGame, SandwichTwinAndBound) {
  CounterRng rng(6);
  for (int T : {4, 8}) {
    for (double r : {1.0, 5.0}) {
      SmoothGame g(T, r);
      NonsmoothGame twin(T, r);
      for (int k = 0; k < T; ++k) {
        const HPoint x = random_in_ball(rng, g.xref(), r);
        g.respond(x);
        twin.respond(x);
      }
      EXPECT_NEAR(g.L(), 1.0 / std::tanh(g.a() / (8.0 * T)), 1e-9 * g.L());
      for (int k = 0; k < T; ++k) {
        const double fs = g.history()[k].F, fn = g.nonsmooth_history()[k].F;
        EXPECT_LE(fs, fn + 1e-12);
        EXPECT_GE(fs, fn - g.lambda() - 1e-12);
      }
      const GameFinal fin = g.finalize();
      EXPECT_LE(dist(fin.xstar, twin.finalize().xstar), 1e-12);
      const GameCertificate c = certify(g, fin, g.history(), smooth_gap_bound(g.L(), r, T));
      for (double gap : c.gaps) EXPECT_GE(gap, c.bound - 1e-6);
      EXPECT_LE(c.max_replay_error, 1e-9);
      const double Lc = g.L();
      for (int j = 0; j < 10; ++j) {
        const HPoint x = random_in_ball(rng, g.xref(), r);
        const HPoint y = exp_map(rand_tangent(rng, x, 0.05));
        const Vec diff = ptransport(x, y, fin.f->eval(x).g).vec - fin.f->eval(y).g.vec;
        EXPECT_LE(std::sqrt(std::max(0.0, minkowski(diff, diff))) / dist(x, y), Lc + 1e-3);
      }
    }
  }
}

TEST(GapBound, SquaredDistanceAndConstant) {
  CounterRng rng(7);
  const HPoint xref = HPoint::origin(3);
  for (double r : {0.5, 2.0, 6.0}) {
    const HPoint z = exp_map(rand_tangent(rng, xref, r));
    const GapBoundReport rep = gap_bound_check(*fn_sqdist_point(z), xref, r, zeta(r), 0.0);
    EXPECT_NEAR(rep.gap, 0.5 * r * r, 1e-9 * r * r);
    EXPECT_NEAR(rep.bound, 4.0 * r * r, 1e-12 * r * r);
    EXPECT_TRUE(rep.holds);
  }
  const GapBoundReport c = gap_bound_check(*fn_affine_sum(2.0, {}), xref, 1.0, 1.0, 2.0);
  EXPECT_EQ(c.gap, 0.0);
  EXPECT_TRUE(c.holds);
}
