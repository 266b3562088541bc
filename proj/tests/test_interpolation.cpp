#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hypergconv/errors.hpp"
#include "hypergconv/harness.hpp"
#include "hypergconv/interpolation.hpp"
#include "hypergconv/transcript.hpp"
#include "test_util.hpp"

using namespace hgc;
using hgc::testing::minkowski;
using hgc::testing::rand_point;
using hgc::testing::rand_tangent;

namespace {

// Samples of w_1 d(., z_1)^2/2 + w_2 d(., z_2)^2/2 with |g| <= mu/2, mu = w_1 + w_2.
InterpData sqdist_data(CounterRng& rng, int d, int n) {
  const HPoint c = rand_point(rng, d, 0.5);
  const double w1 = 0.5 + rng.uniform(), w2 = 0.5 + rng.uniform();
  const FnPtr f = fn_affine_sum(0.3, {{w1, fn_sqdist_point(exp_map(rand_tangent(rng, c, 0.2)))},
                                      {w2, fn_sqdist_point(exp_map(rand_tangent(rng, c, 0.2)))}});
  InterpData data;
  data.mu = w1 + w2;
  while (static_cast<int>(data.items.size()) < n) {
    const OracleSample s = f->eval(exp_map(rand_tangent(rng, c, rng.uniform())));
    if (s.g.norm() <= 0.5 * data.mu) data.items.push_back(s);
  }
  return data;
}

}  // namespace

TEST(Necessary, PassesOnConvexDataAndFindsViolations) {
  CounterRng rng(1);
  for (int inst = 0; inst < 10; ++inst) {
    InterpData data = sqdist_data(rng, 3, 6);
    const NecessaryReport ok = check_necessary(data);
    EXPECT_TRUE(ok.pass);
    EXPECT_GE(ok.slack, -1e-9);
    data.items[2].F -= 10.0;
    const NecessaryReport bad = check_necessary(data);
    EXPECT_FALSE(bad.pass);
    EXPECT_EQ(bad.worst_j, 2);
  }
}

TEST(Necessary, ValidatesInput) {
  CounterRng rng(2);
  InterpData data = sqdist_data(rng, 3, 3);
  data.mu = -1.0;
  EXPECT_THROW(check_necessary(data), DomainError);
  data = sqdist_data(rng, 3, 3);
  data.items[1].g.vec += data.items[1].x.coords();
  EXPECT_THROW(check_necessary(data), DomainError);
  data = sqdist_data(rng, 3, 3);
  data.items.push_back(OracleSample{0.0, HPoint::origin(2), HTangent::zero(HPoint::origin(2))});
  EXPECT_THROW(check_necessary(data), DimensionError);
}

TEST(Obstruction, ForcedValueExceedsConvexBound) {
  for (int i = 0; i <= 20; ++i) {
    const double theta = 0.05 + (std::numbers::pi / 2 - 0.1) * i / 20.0;
    for (bool perp : {false, true}) {
      const Obstruction ob = obstruction_certificate(theta, perp);
      const HPoint &x1 = ob.data.items[0].x, &x2 = ob.data.items[1].x, &x3 = ob.data.items[2].x;
      EXPECT_NEAR(dist(x1, x2), 1.0, 1e-12);
      EXPECT_NEAR(dist(x1, x3), 1.0, 1e-12);
      const HTangent l2 = log_map(x1, x2), l3 = log_map(x1, x3);
      EXPECT_NEAR(std::acos(l2.inner(l3)), 2.0 * theta, 1e-9);
      // Right triangle x1, p, x2 with hypotenuse 1 and angle theta at x1.
      const double h = std::atanh(std::cos(theta) * std::tanh(1.0));
      EXPECT_NEAR(ob.h, h, 1e-12);
      EXPECT_NEAR(dist(x2, ob.p), dist(x3, ob.p), 1e-12);
      EXPECT_NEAR(dist(x2, ob.p) + dist(ob.p, x3), dist(x2, x3), 1e-12);
      // The subgradient inequality at x1 forces f(p) >= lower.
      const OracleSample& s1 = ob.data.items[0];
      EXPECT_NEAR(s1.F + minkowski(s1.g.vec, log_map(x1, ob.p).vec), ob.lower, 1e-12);
      EXPECT_NEAR(ob.lower, 1.0 - h / std::cos(theta), 1e-12);
      EXPECT_EQ(ob.upper, std::max(ob.data.items[1].F, ob.data.items[2].F));
      EXPECT_TRUE(ob.valid());
      EXPECT_TRUE(check_necessary(ob.data).pass) << theta << " " << perp;
    }
  }
  // Value at theta = 0.8 from Python: 1 - atanh(cos(0.8) tanh 1) / cos(0.8).
  EXPECT_NEAR(obstruction_certificate(0.8).lower, 0.15173674085927702, 1e-12);
  EXPECT_THROW(obstruction_certificate(0.0), DomainError);
  EXPECT_THROW(obstruction_certificate(std::numbers::pi / 2), DomainError);
}

TEST(Sufficient, InterpolatesAndIsConvex) {
  CounterRng rng(3);
  for (int inst = 0; inst < 10; ++inst) {
    const InterpData data = sqdist_data(rng, 3, 6);
    const auto out = construct_sufficient(data, 100, inst);
    ASSERT_TRUE(std::holds_alternative<Interpolant>(out));
    const Interpolant& ip = std::get<Interpolant>(out);
    EXPECT_TRUE(ip.verified);
    for (const OracleSample& s : data.items) {
      EXPECT_NEAR(ip.f->value(s.x), s.F, 1e-9);
      for (int k = 0; k < 50; ++k) {
        const HPoint z = exp_map(rand_tangent(rng, s.x, 3.0 * rng.uniform()));
        EXPECT_GE(ip.f->value(z) - s.F - minkowski(s.g.vec, log_map(s.x, z).vec), -1e-9);
      }
    }
    for (int k = 0; k < 50; ++k) {
      const HPoint a = rand_point(rng, 3), b = rand_point(rng, 3);
      EXPECT_GE(midpoint_slack(*ip.f, a, b, 0.5 * data.mu), -1e-9);
    }
  }
}

TEST(Sufficient, NotApplicable) {
  CounterRng rng(4);
  InterpData data = sqdist_data(rng, 3, 4);
  data.mu = 0.1;
  EXPECT_TRUE(std::holds_alternative<NotApplicable>(construct_sufficient(data)));
  EXPECT_TRUE(std::holds_alternative<NotApplicable>(construct_sufficient(InterpData{})));
  EXPECT_TRUE(std::holds_alternative<NotApplicable>(construct_sufficient(obstruction_certificate(0.8).data)));
}

TEST(MinimalFunction, MeetsTheLinearBound) {
  CounterRng rng(5);
  for (int i = 0; i < 200; ++i) {
    const HPoint y = rand_point(rng, 3);
    const HTangent g = rand_tangent(rng, y, 3.0 * rng.uniform());
    const HPoint x = exp_map(rand_tangent(rng, y, 0.1 + 2.0 * rng.uniform()));
    const double F = rng.uniform(-2.0, 2.0);
    const MinimalFunction mf = minimal_function(F, y, g, x, 20, i);
    const double target = F + minkowski(g.vec, log_map(y, x).vec);
    EXPECT_TRUE(mf.certified);
    EXPECT_NEAR(mf.target, target, 1e-12 * std::max(1.0, std::abs(target)));
    EXPECT_NEAR(mf.f->value(x), target, 1e-8 * std::max(1.0, std::abs(target)));
    EXPECT_NEAR(mf.f->value(y), F, 1e-9);
    for (int k = 0; k < 20; ++k) {
      const HPoint a = rand_point(rng, 3, 2.0), b = rand_point(rng, 3, 2.0);
      EXPECT_GE(midpoint_slack(*mf.f, a, b, 0.0), -1e-9);
      EXPECT_GE(mf.f->value(a) - F - minkowski(g.vec, log_map(y, a).vec), -1e-8 * std::max(1.0, std::abs(F) + 3.0 * dist(a, y)));
    }
  }
  const HPoint y = HPoint::origin(2);
  EXPECT_THROW(minimal_function(0.0, y, HTangent::zero(y), y), DomainError);
}

TEST(InterpJson, RoundTrip) {
  CounterRng rng(6);
  const InterpData data = sqdist_data(rng, 4, 5);
  const Json j = interp_to_json(data);
  const InterpData back = interp_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.mu, data.mu);
  ASSERT_EQ(back.items.size(), data.items.size());
  for (std::size_t i = 0; i < data.items.size(); ++i) {
    EXPECT_EQ(back.items[i].F, data.items[i].F);
    EXPECT_EQ((back.items[i].x.coords() - data.items[i].x.coords()).norm(), 0.0);
    EXPECT_EQ((back.items[i].g.vec - data.items[i].g.vec).norm(), 0.0);
  }
  Json bad = j;
  bad["items"][0]["g"] = Json::array({1.0, 0.0, 0.0, 0.0, 0.0});
  EXPECT_THROW(interp_from_json(bad), DomainError);
  bad = j;
  bad["items"][0]["x"] = Json::array({1.0, 0.0});
  EXPECT_THROW(interp_from_json(bad), DimensionError);
}
