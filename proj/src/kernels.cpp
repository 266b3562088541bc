#include "hypergconv/kernels.hpp"

#include <algorithm>
#include <exception>
#include <limits>

#include <omp.h>

namespace hgc {

namespace {

NormalScore score_one(const Eigen::MatrixXd& C, const double* w, double thresh) {
  NormalScore s;
  const int rows = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  for (int i = 0; i < n; ++i) {
    const double* c = C.data() + static_cast<std::ptrdiff_t>(i) * rows;
    double ip = -c[0] * w[0];
    for (int k = 1; k < rows; ++k) ip += c[k] * w[k];
    if (ip > thresh) {
      ++s.pos;
    } else if (ip < -thresh) {
      ++s.neg;
    } else {
      ++s.cut;
    }
  }
  return s;
}

double pair_min_row(const Eigen::MatrixXd& C, int i) {
  const int rows = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  const double* a = C.data() + static_cast<std::ptrdiff_t>(i) * rows;
  double best = std::numeric_limits<double>::infinity();
  for (int j = i + 1; j < n; ++j) {
    const double* b = C.data() + static_cast<std::ptrdiff_t>(j) * rows;
    double ip = a[0] * b[0];
    for (int k = 1; k < rows; ++k) ip -= a[k] * b[k];
    best = std::min(best, ip);
  }
  return best;
}

}  // namespace

std::vector<NormalScore> score_normals_serial(const Eigen::MatrixXd& C, const Eigen::MatrixXd& W, double thresh) {
  std::vector<NormalScore> out(W.cols());
  for (int j = 0; j < W.cols(); ++j) out[j] = score_one(C, W.col(j).data(), thresh);
  return out;
}

std::vector<NormalScore> score_normals_omp(const Eigen::MatrixXd& C, const Eigen::MatrixXd& W, double thresh) {
  std::vector<NormalScore> out(W.cols());
  const int m = static_cast<int>(W.cols());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < m; ++j) out[j] = score_one(C, W.col(j).data(), thresh);
  return out;
}

double min_pair_cosh_serial(const Eigen::MatrixXd& C) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < C.cols(); ++i) best = std::min(best, pair_min_row(C, i));
  return best;
}

double min_pair_cosh_omp(const Eigen::MatrixXd& C) {
  double best = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(C.cols());
#pragma omp parallel for schedule(dynamic, 64) reduction(min : best)
  for (int i = 0; i < n - 1; ++i) best = std::min(best, pair_min_row(C, i));
  return best;
}

std::vector<OracleSample> eval_batch_serial(const FnOracle& f, const std::vector<HPoint>& xs) {
  std::vector<OracleSample> out;
  out.reserve(xs.size());
  for (const HPoint& x : xs) out.push_back(f.eval(x));
  return out;
}

std::vector<OracleSample> eval_batch_omp(const FnOracle& f, const std::vector<HPoint>& xs) {
  std::vector<OracleSample> out(xs.size());
  const int n = static_cast<int>(xs.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = f.eval(xs[i]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace hgc
