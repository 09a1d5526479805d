#pragma once

#include <Eigen/Dense>

namespace nds::dynamics {

struct GeneralizedEigen {
  Eigen::VectorXd natural_freqs;  // ascending, rad/s
  Eigen::MatrixXd shapes;         // columns are mass-normalized mode shapes
};

// Solves K phi = w^2 M phi for diagonal positive M and symmetric K by cyclic
// Jacobi rotations on M^{-1/2} K M^{-1/2}. Shapes satisfy phi_i^T M phi_j = delta_ij;
// each is signed so its largest-magnitude entry is positive.
// Throws ConvergenceError when the sweep cap is reached.
GeneralizedEigen eig_sym_positive(const Eigen::VectorXd& mass_diag, const Eigen::MatrixXd& K,
                                  int max_sweeps = 100);

}  // namespace nds::dynamics
