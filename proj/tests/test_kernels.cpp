#include <gtest/gtest.h>

#include <cmath>

#include <omp.h>

#include "hypergconv/errors.hpp"
#include "hypergconv/kernels.hpp"
#include "test_util.hpp"

using namespace hgc;
using hgc::testing::rand_point;
using hgc::testing::rand_tangent;

namespace {

Eigen::MatrixXd points(CounterRng& rng, int d, int n) {
  Eigen::MatrixXd C(d + 1, n);
  for (int i = 0; i < n; ++i) C.col(i) = rand_point(rng, d, 1.5).coords();
  return C;
}

Eigen::MatrixXd normals(CounterRng& rng, const HPoint& x, int m) {
  Eigen::MatrixXd W(x.coords().size(), m);
  for (int j = 0; j < m; ++j) W.col(j) = rand_tangent(rng, x, 1.0).vec;
  return W;
}

// Oversubscribed on purpose so the parallel loops really split.
class Kernels : public ::testing::Test {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(4);
  }
  void TearDown() override { omp_set_num_threads(saved_); }
  int saved_ = 1;
};

}  // namespace

TEST_F(Kernels, ScoreNormalsMatchesDirectCount) {
  CounterRng rng(1);
  for (int d : {2, 3, 6}) {
    const Eigen::MatrixXd C = points(rng, d, 500);
    const HPoint x = rand_point(rng, d);
    const Eigen::MatrixXd W = normals(rng, x, 64);
    const double thresh = std::sinh(0.1);
    const auto s = score_normals_serial(C, W, thresh);
    const auto p = score_normals_omp(C, W, thresh);
    ASSERT_EQ(s.size(), 64u);
    ASSERT_EQ(p.size(), 64u);
    for (int j = 0; j < 64; ++j) {
      int pos = 0, neg = 0, cut = 0;
      for (int i = 0; i < C.cols(); ++i) {
        const double ip = mink_inner(C.col(i), W.col(j));
        pos += ip > thresh;
        neg += ip < -thresh;
        cut += std::abs(ip) <= thresh;
      }
      EXPECT_EQ(s[j].pos, pos);
      EXPECT_EQ(s[j].neg, neg);
      EXPECT_EQ(s[j].cut, cut);
      EXPECT_EQ(p[j].pos, s[j].pos);
      EXPECT_EQ(p[j].neg, s[j].neg);
      EXPECT_EQ(p[j].cut, s[j].cut);
    }
  }
}

TEST_F(Kernels, MinPairCoshMatchesDistances) {
  CounterRng rng(2);
  for (int n : {0, 1, 2, 7, 300}) {
    const Eigen::MatrixXd C = points(rng, 3, n);
    const double s = min_pair_cosh_serial(C), p = min_pair_cosh_omp(C);
    EXPECT_EQ(s, p);
    if (n < 2) {
      EXPECT_TRUE(std::isinf(s));
      continue;
    }
    double best = 1e300;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        best = std::min(best, dist(HPoint::from_coords(C.col(i)), HPoint::from_coords(C.col(j))));
    EXPECT_NEAR(std::acosh(std::max(1.0, s)), best, 1e-7);
  }
}

TEST_F(Kernels, EvalBatchIdentical) {
  CounterRng rng(3);
  const FnPtr f = fn_sqdist_point(rand_point(rng, 4));
  std::vector<HPoint> xs;
  for (int i = 0; i < 257; ++i) xs.push_back(rand_point(rng, 4));
  const auto s = eval_batch_serial(*f, xs), p = eval_batch_omp(*f, xs);
  ASSERT_EQ(s.size(), xs.size());
  ASSERT_EQ(p.size(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(s[i].F, p[i].F);
    EXPECT_EQ((s[i].g.vec - p[i].g.vec).norm(), 0.0);
    EXPECT_NEAR(s[i].F, f->value(xs[i]), 1e-13 * std::max(1.0, s[i].F));
  }
  EXPECT_TRUE(eval_batch_omp(*f, {}).empty());
}

TEST_F(Kernels, EvalBatchPropagatesErrors) {
  CounterRng rng(4);
  const FnPtr f = fn_dist_point(rand_point(rng, 3));
  std::vector<HPoint> xs(10, rand_point(rng, 3));
  xs[6] = HPoint::origin(5);
  EXPECT_THROW(eval_batch_serial(*f, xs), Error);
  EXPECT_THROW(eval_batch_omp(*f, xs), Error);
}
