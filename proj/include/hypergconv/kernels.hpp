#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hypergconv/zoo.hpp"

namespace hgc {

/// Candidate counts for one hyperplane normal w: |<c,w>| <= thresh (cut),
/// <c,w> > thresh (pos) and <c,w> < -thresh (neg).
struct NormalScore {
  int cut = 0;
  int pos = 0;
  int neg = 0;
};

/// C holds candidate points as columns, W unit normals as columns (both in
/// ambient coordinates). Serial reference and OpenMP version over normals;
/// outputs are identical.
std::vector<NormalScore> score_normals_serial(const Eigen::MatrixXd& C, const Eigen::MatrixXd& W, double thresh);
std::vector<NormalScore> score_normals_omp(const Eigen::MatrixXd& C, const Eigen::MatrixXd& W, double thresh);

/// min over pairs i < j of -<c_i, c_j> = cosh(dist); +inf for fewer than two points.
double min_pair_cosh_serial(const Eigen::MatrixXd& C);
double min_pair_cosh_omp(const Eigen::MatrixXd& C);

/// f.eval at every point. The OpenMP version needs an oracle that is safe for
/// concurrent eval (all zoo oracles are).
std::vector<OracleSample> eval_batch_serial(const FnOracle& f, const std::vector<HPoint>& xs);
std::vector<OracleSample> eval_batch_omp(const FnOracle& f, const std::vector<HPoint>& xs);

}  // namespace hgc
