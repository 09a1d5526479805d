#pragma once

#include <functional>

#include <Eigen/Dense>

#include "nds/dynamics/load.hpp"
#include "nds/dynamics/mdof.hpp"
#include "nds/dynamics/response.hpp"
#include "nds/dynamics/sdof.hpp"
#include "nds/dynamics/time_grid.hpp"

namespace nds::dynamics {

// M u'' + C u' + F_int(u) = p(t), started from rest.
struct MechanicalSystem {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd damping;
  // Writes F_int(u) and dF_int/du.
  std::function<void(const Eigen::VectorXd& u, Eigen::VectorXd& force, Eigen::MatrixXd& tangent)>
      internal_force;

  Eigen::Index n_dofs() const { return mass.rows(); }
};

using LoadFunction = std::function<Eigen::VectorXd(double t)>;

enum class NewmarkScheme {
  fox_goodwin,            // gamma = 1/2, beta = 1/12
  average_acceleration,   // gamma = 1/2, beta = 1/4
  linear_acceleration,    // gamma = 1/2, beta = 1/6
};

struct NewmarkOptions {
  NewmarkScheme scheme = NewmarkScheme::fox_goodwin;
  double newton_tolerance = 1e-10;  // relative residual
  int max_newton_iterations = 20;
};

// Integrator states at the observation instants, one row per instant.
struct NewmarkResult {
  Eigen::MatrixXd displacement;
  Eigen::MatrixXd velocity;
  Eigen::MatrixXd acceleration;

  // 0-based degree of freedom.
  ResponseSeries series(Eigen::Index dof) const;
};

// Newmark time stepping with a full-tangent Newton solve per step. States are
// recorded every grid.substeps() steps without interpolation. Throws
// ConvergenceError carrying the fine-step index when Newton stalls.
NewmarkResult newmark_integrate(const MechanicalSystem& system, const LoadFunction& load,
                                const TimeGrid& grid, const NewmarkOptions& options = {});

MechanicalSystem sdof_system(const SdofParams& params);
// Shear frame under ground acceleration; load is -a_g(t) M 1.
MechanicalSystem mdof_system(const MdofSystem& system);

ResponseSeries sdof_newmark_response(const SdofParams& params, const HarmonicLoad& load,
                                     const TimeGrid& grid, const NewmarkOptions& options = {});
ResponseSeries mdof_newmark_response(const MdofSystem& system, const HarmonicLoad& ground_accel,
                                     const TimeGrid& grid, int dof,
                                     const NewmarkOptions& options = {});

}  // namespace nds::dynamics
