// Serial reference vs OpenMP for the three kernels.
#include <benchmark/benchmark.h>

#include "hypergconv/harness.hpp"
#include "hypergconv/kernels.hpp"

namespace {

using namespace hgc;

Eigen::MatrixXd random_points(int d, int n, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::MatrixXd C(d + 1, n);
  for (int i = 0; i < n; ++i) C.col(i) = random_in_ball(rng, HPoint::origin(d), 3.0).coords();
  return C;
}

Eigen::MatrixXd random_normals(int d, int m, std::uint64_t seed) {
  CounterRng rng(seed);
  const HPoint x = random_in_ball(rng, HPoint::origin(d), 1.0);
  Eigen::MatrixXd W(d + 1, m);
  for (int j = 0; j < m; ++j) {
    Vec v(d + 1);
    for (int i = 0; i <= d; ++i) v[i] = rng.normal();
    const HTangent t = HTangent::project(x, v);
    W.col(j) = t.vec / t.norm();
  }
  return W;
}

template <bool Parallel>
void BM_ScoreNormals(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Eigen::MatrixXd C = random_points(3, n, 1), W = random_normals(3, 512, 2);
  for (auto _ : st) {
    auto out = Parallel ? score_normals_omp(C, W, 0.05) : score_normals_serial(C, W, 0.05);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * n * 512);
}

template <bool Parallel>
void BM_MinPairCosh(benchmark::State& st) {
  const Eigen::MatrixXd C = random_points(3, static_cast<int>(st.range(0)), 3);
  for (auto _ : st) benchmark::DoNotOptimize(Parallel ? min_pair_cosh_omp(C) : min_pair_cosh_serial(C));
}

template <bool Parallel>
void BM_EvalBatch(benchmark::State& st) {
  CounterRng rng(4);
  const FnPtr f = fn_sqdist_point(random_in_ball(rng, HPoint::origin(5), 1.0));
  std::vector<HPoint> xs;
  for (int i = 0; i < st.range(0); ++i) xs.push_back(random_in_ball(rng, HPoint::origin(5), 2.0));
  for (auto _ : st) {
    auto out = Parallel ? eval_batch_omp(*f, xs) : eval_batch_serial(*f, xs);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_ScoreNormals<false>)->Arg(1000)->Arg(10000);
BENCHMARK(BM_ScoreNormals<true>)->Arg(1000)->Arg(10000);
BENCHMARK(BM_MinPairCosh<false>)->Arg(2000);
BENCHMARK(BM_MinPairCosh<true>)->Arg(2000);
BENCHMARK(BM_EvalBatch<false>)->Arg(10000);
BENCHMARK(BM_EvalBatch<true>)->Arg(10000);

BENCHMARK_MAIN();
