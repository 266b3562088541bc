#pragma once

#include <Eigen/Dense>

namespace hgc {

/// Minimizes 0.5 a'Qa - c'a over the probability simplex with a primal
/// active-set method. Q must be symmetric positive semidefinite; a tiny ridge
/// is added internally so singular Q (parallel gradients) is handled.
Eigen::VectorXd solve_simplex_qp(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c);

}  // namespace hgc
