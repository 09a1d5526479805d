#include "nds/dynamics/newmark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nds/common/error.hpp"

namespace nds::dynamics {

namespace {

struct SchemeParams {
  double gamma;
  double beta;
};

SchemeParams scheme_params(NewmarkScheme scheme) {
  switch (scheme) {
    case NewmarkScheme::fox_goodwin: return {0.5, 1.0 / 12.0};
    case NewmarkScheme::average_acceleration: return {0.5, 0.25};
    case NewmarkScheme::linear_acceleration: return {0.5, 1.0 / 6.0};
  }
  throw InvalidArgument("unknown Newmark scheme");
}

// Gershgorin bound on the largest eigenvalue of M^{-1} K.
double max_omega_squared_bound(const Eigen::MatrixXd& M, const Eigen::MatrixXd& K) {
  const Eigen::MatrixXd A = M.partialPivLu().solve(K);
  double bound = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) bound = std::max(bound, A.row(i).cwiseAbs().sum());
  return bound;
}

}  // namespace

ResponseSeries NewmarkResult::series(Eigen::Index dof) const {
  const auto n = static_cast<std::size_t>(displacement.rows());
  ResponseSeries out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.displacement[k] = displacement(static_cast<Eigen::Index>(k), dof);
    out.acceleration[k] = acceleration(static_cast<Eigen::Index>(k), dof);
  }
  return out;
}

NewmarkResult newmark_integrate(const MechanicalSystem& system, const LoadFunction& load,
                                const TimeGrid& grid, const NewmarkOptions& options) {
  grid.validate();
  const Eigen::Index nd = system.n_dofs();
  if (system.damping.rows() != nd || system.damping.cols() != nd || system.mass.cols() != nd)
    throw ShapeError("newmark: mass and damping must be square and equally sized");

  const auto [gamma, beta] = scheme_params(options.scheme);
  const double dt = grid.fine_step;
  const std::size_t stride = grid.substeps();
  const std::size_t n_obs = grid.n_points();
  const std::size_t n_steps = grid.n_fine_steps();

  Eigen::VectorXd u = Eigen::VectorXd::Zero(nd);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(nd);
  Eigen::VectorXd f_int(nd);
  Eigen::MatrixXd k_t(nd, nd);
  system.internal_force(u, f_int, k_t);

  if (2.0 * beta < gamma) {
    // Conditionally stable member: require w_max dt below the critical value.
    const double omega_crit = 1.0 / std::sqrt(gamma / 2.0 - beta);
    const double w_max = std::sqrt(max_omega_squared_bound(system.mass, k_t));
    if (w_max * dt >= omega_crit)
      throw InvalidArgument("newmark: fine_step exceeds the stability limit of the scheme");
  }

  const auto mass_lu = system.mass.partialPivLu();
  Eigen::VectorXd p = load(0.0);
  if (p.size() != nd) throw ShapeError("newmark: load vector size does not match system");
  Eigen::VectorXd a = mass_lu.solve(p - system.damping * v - f_int);

  NewmarkResult out;
  out.displacement = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_obs), nd);
  out.velocity = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_obs), nd);
  out.acceleration = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_obs), nd);
  out.acceleration.row(0) = a.transpose();

  const double c_a = 1.0 / (beta * dt * dt);
  const double c_v = gamma / (beta * dt);
  Eigen::VectorXd residual(nd);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    p = load(t);
    // Newmark predictors: a_{n+1} = c_a (u_{n+1} - u_pred), v_{n+1} = v_pred + gamma dt a_{n+1}.
    const Eigen::VectorXd u_pred = u + dt * v + dt * dt * (0.5 - beta) * a;
    const Eigen::VectorXd v_pred = v + dt * (1.0 - gamma) * a;

    Eigen::VectorXd u_new = u;
    Eigen::VectorXd a_new(nd);
    Eigen::VectorXd v_new(nd);
    bool converged = false;
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= options.max_newton_iterations; ++it) {
      a_new = c_a * (u_new - u_pred);
      v_new = v_pred + gamma * dt * a_new;
      system.internal_force(u_new, f_int, k_t);
      const Eigen::VectorXd inertia = system.mass * a_new;
      const Eigen::VectorXd damping = system.damping * v_new;
      residual = p - inertia - damping - f_int;
      const double scale =
          std::max({p.norm(), inertia.norm(), damping.norm(), f_int.norm()});
      // The second test stops once the residual sits at its round-off floor,
      // which for small loads can exceed the relative tolerance.
      if (it > 0 && (residual.norm() <= options.newton_tolerance * scale ||
                     last_step <= 1e-13 * u_new.norm())) {
        converged = true;
        break;
      }
      if (it == options.max_newton_iterations) break;
      const Eigen::MatrixXd k_eff = k_t + c_v * system.damping + c_a * system.mass;
      const Eigen::VectorXd du = k_eff.partialPivLu().solve(residual);
      u_new += du;
      last_step = du.norm();
    }
    if (!converged) throw ConvergenceError("newmark: Newton iteration did not converge", step);

    u = u_new;
    v = v_new;
    a = a_new;
    if (step % stride == 0) {
      const auto k = static_cast<Eigen::Index>(step / stride);
      out.displacement.row(k) = u.transpose();
      out.velocity.row(k) = v.transpose();
      out.acceleration.row(k) = a.transpose();
    }
  }
  return out;
}

MechanicalSystem sdof_system(const SdofParams& params) {
  params.validate();
  MechanicalSystem sys;
  sys.mass = Eigen::MatrixXd::Constant(1, 1, params.mass);
  sys.damping = Eigen::MatrixXd::Constant(1, 1, params.damping);
  const double k = params.stiffness;
  const double b = params.cubic_coeff;
  sys.internal_force = [k, b](const Eigen::VectorXd& u, Eigen::VectorXd& f, Eigen::MatrixXd& kt) {
    const double x = u(0);
    f.resize(1);
    kt.resize(1, 1);
    f(0) = k * x + b * x * x * x;
    kt(0, 0) = k + 3.0 * b * x * x;
  };
  return sys;
}

MechanicalSystem mdof_system(const MdofSystem& system) {
  MechanicalSystem sys;
  sys.mass = system.matrices.M;
  sys.damping = system.matrices.C;
  const MdofParams params = system.params;
  sys.internal_force = [params](const Eigen::VectorXd& u, Eigen::VectorXd& f,
                                Eigen::MatrixXd& kt) {
    auto r = mdof_internal_force(params, u);
    f = std::move(r.force);
    kt = std::move(r.tangent);
  };
  return sys;
}

ResponseSeries sdof_newmark_response(const SdofParams& params, const HarmonicLoad& load,
                                     const TimeGrid& grid, const NewmarkOptions& options) {
  const auto sys = sdof_system(params);
  const auto result = newmark_integrate(
      sys, [&load](double t) { return Eigen::VectorXd::Constant(1, load(t)); }, grid, options);
  return result.series(0);
}

ResponseSeries mdof_newmark_response(const MdofSystem& system, const HarmonicLoad& ground_accel,
                                     const TimeGrid& grid, int dof,
                                     const NewmarkOptions& options) {
  if (dof < 1 || dof > kMdofDofs) throw InvalidArgument("mdof: dof must be in 1..6");
  const auto sys = mdof_system(system);
  const Eigen::VectorXd m_ones = system.matrices.M.diagonal();
  const auto result = newmark_integrate(
      sys, [&](double t) -> Eigen::VectorXd { return -ground_accel(t) * m_ones; }, grid, options);
  return result.series(dof - 1);
}

}  // namespace nds::dynamics
