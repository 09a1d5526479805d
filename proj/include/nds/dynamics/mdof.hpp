#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "nds/dynamics/jacobi.hpp"
#include "nds/dynamics/load.hpp"
#include "nds/dynamics/response.hpp"
#include "nds/dynamics/sdof.hpp"
#include "nds/dynamics/time_grid.hpp"

namespace nds::dynamics {

inline constexpr int kMdofDofs = 6;

// Six-story shear frame, two stories per mass value.
struct MdofParams {
  std::array<double, 3> story_masses{};  // kg
  double youngs_modulus = 0.0;           // N/m^2
  double moment_of_inertia = 0.0;        // m^4
  double story_height = 0.0;             // m
  double damping_ratio = 0.0;
  double cubic_coeff = 0.0;  // N/m^3

  // k = 24 E I / H^3
  double story_stiffness() const;
  void validate() const;

  static MdofParams reference(double cubic_coeff = 0.0);
};

struct MdofMatrices {
  Eigen::MatrixXd M, K, C;
  double alpha0 = 0.0;  // Rayleigh mass coefficient, 1/s
  double alpha1 = 0.0;  // Rayleigh stiffness coefficient, s
};

MdofMatrices assemble_mdof(const MdofParams& params);

struct ModalData {
  Eigen::VectorXd natural_freqs;     // w_ni
  Eigen::MatrixXd shapes;            // mass-normalized, one per column
  Eigen::VectorXd damping_ratios;    // (alpha0 + alpha1 w^2) / (2 w)
  Eigen::VectorXd decays;            // (alpha0 + alpha1 w^2) / 2
  Eigen::VectorXd damped_freqs;      // sqrt(4 w^2 - (alpha0 + alpha1 w^2)^2) / 2
  Eigen::VectorXd participation;     // -phi_i^T M 1
};

// Precomputed matrices and modes of one frame; reused across loads.
struct MdofSystem {
  MdofParams params;
  MdofMatrices matrices;
  ModalData modal;
};

MdofSystem build_mdof_system(const MdofParams& params);

// Per-mode coefficients G_i, H_i, I_i.. for one ground-acceleration record.
std::vector<OscillatorCoeffs> mdof_modal_coeffs(const MdofSystem& system,
                                                const HarmonicLoad& ground_accel);

// Modal-superposition response of the linear frame (cubic_coeff must be 0)
// at the 1-based degree of freedom `dof`.
ResponseSeries mdof_linear_response(const MdofSystem& system, const HarmonicLoad& ground_accel,
                                    const TimeGrid& grid, int dof);
ResponseSeries mdof_linear_response(const MdofParams& params, const HarmonicLoad& ground_accel,
                                    const TimeGrid& grid, int dof);

// Internal force of the cubic-spring frame and its Jacobian dF/du.
struct InternalForce {
  Eigen::VectorXd force;
  Eigen::MatrixXd tangent;
};

InternalForce mdof_internal_force(const MdofParams& params, const Eigen::VectorXd& u);

}  // namespace nds::dynamics
