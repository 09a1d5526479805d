#include "nds/dynamics/mdof.hpp"

#include <cmath>

#include "nds/common/error.hpp"

namespace nds::dynamics {

double MdofParams::story_stiffness() const {
  return 24.0 * youngs_modulus * moment_of_inertia / std::pow(story_height, 3);
}

void MdofParams::validate() const {
  for (double m : story_masses)
    if (!(m > 0.0)) throw InvalidArgument("mdof: story masses must be positive");
  if (!(youngs_modulus > 0.0) || !(moment_of_inertia > 0.0) || !(story_height > 0.0) ||
      !(damping_ratio > 0.0))
    throw InvalidArgument("mdof: E, I, H and damping ratio must be positive");
  if (!(cubic_coeff >= 0.0)) throw InvalidArgument("mdof: cubic coefficient must be non-negative");
}

MdofParams MdofParams::reference(double cubic_coeff) {
  return {{14000.0, 12000.0, 10000.0}, 2e11, 4.2e-4, 3.5, 0.02, cubic_coeff};
}

MdofMatrices assemble_mdof(const MdofParams& params) {
  params.validate();
  constexpr int n = kMdofDofs;
  MdofMatrices out;
  out.M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) out.M(i, i) = params.story_masses[static_cast<std::size_t>(i / 2)];

  const double k = params.story_stiffness();
  out.K = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    out.K(i, i) = i + 1 < n ? 2.0 * k : k;
    if (i + 1 < n) {
      out.K(i, i + 1) = -k;
      out.K(i + 1, i) = -k;
    }
  }

  const auto eig = eig_sym_positive(out.M.diagonal(), out.K);
  const double w1 = eig.natural_freqs(0);
  const double w2 = eig.natural_freqs(1);
  out.alpha0 = 2.0 * params.damping_ratio * w1 * w2 / (w1 + w2);
  out.alpha1 = 2.0 * params.damping_ratio / (w1 + w2);
  out.C = out.alpha0 * out.M + out.alpha1 * out.K;
  return out;
}

MdofSystem build_mdof_system(const MdofParams& params) {
  MdofSystem sys;
  sys.params = params;
  sys.matrices = assemble_mdof(params);
  const auto eig = eig_sym_positive(sys.matrices.M.diagonal(), sys.matrices.K);

  auto& modal = sys.modal;
  const Eigen::Index n = eig.natural_freqs.size();
  modal.natural_freqs = eig.natural_freqs;
  modal.shapes = eig.shapes;
  modal.damping_ratios.resize(n);
  modal.decays.resize(n);
  modal.damped_freqs.resize(n);
  modal.participation.resize(n);
  const double a0 = sys.matrices.alpha0;
  const double a1 = sys.matrices.alpha1;
  const Eigen::VectorXd mass_diag = sys.matrices.M.diagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = modal.natural_freqs(i);
    const double two_rho = a0 + a1 * w * w;
    modal.damping_ratios(i) = two_rho / (2.0 * w);
    modal.decays(i) = two_rho / 2.0;
    const double disc = 4.0 * w * w - two_rho * two_rho;
    if (!(disc > 0.0)) throw InvalidArgument("mdof: mode is not underdamped");
    modal.damped_freqs(i) = std::sqrt(disc) / 2.0;
    modal.participation(i) = -modal.shapes.col(i).dot(mass_diag);
  }
  return sys;
}

std::vector<OscillatorCoeffs> mdof_modal_coeffs(const MdofSystem& system,
                                                const HarmonicLoad& ground_accel) {
  const auto& modal = system.modal;
  std::vector<OscillatorCoeffs> out;
  out.reserve(static_cast<std::size_t>(modal.natural_freqs.size()));
  for (Eigen::Index i = 0; i < modal.natural_freqs.size(); ++i) {
    const double w = modal.natural_freqs(i);
    out.push_back(oscillator_coeffs(w, modal.damping_ratios(i), modal.participation(i), w * w,
                                    ground_accel));
  }
  return out;
}

ResponseSeries mdof_linear_response(const MdofSystem& system, const HarmonicLoad& ground_accel,
                                    const TimeGrid& grid, int dof) {
  if (dof < 1 || dof > kMdofDofs) throw InvalidArgument("mdof: dof must be in 1..6");
  if (system.params.cubic_coeff != 0.0)
    throw InvalidArgument("mdof: modal solution needs cubic_coeff == 0");
  ground_accel.validate();
  const auto coeffs = mdof_modal_coeffs(system, ground_accel);
  const Eigen::Index row = dof - 1;
  const std::size_t n = grid.n_points();
  ResponseSeries out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.time(k);
    double u = 0.0;
    double a = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double phi = system.modal.shapes(row, static_cast<Eigen::Index>(i));
      u += phi * coeffs[i].displacement(t);
      a += phi * coeffs[i].acceleration(t);
    }
    out.displacement[k] = k == 0 ? 0.0 : u;
    out.acceleration[k] = a;
  }
  return out;
}

ResponseSeries mdof_linear_response(const MdofParams& params, const HarmonicLoad& ground_accel,
                                    const TimeGrid& grid, int dof) {
  return mdof_linear_response(build_mdof_system(params), ground_accel, grid, dof);
}

InternalForce mdof_internal_force(const MdofParams& params, const Eigen::VectorXd& u) {
  constexpr int n = kMdofDofs;
  if (u.size() != n) throw ShapeError("mdof_internal_force: u must have 6 entries");
  const double k = params.story_stiffness();
  const double b = params.cubic_coeff;
  InternalForce out{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  // Spring s connects dof s-1 (ground for s = 0) to dof s; drift d = u_s - u_{s-1}.
  for (int s = 0; s < n; ++s) {
    const double d = s == 0 ? u(0) : u(s) - u(s - 1);
    const double f = k * d + b * d * d * d;
    const double kt = k + 3.0 * b * d * d;
    out.force(s) += f;
    out.tangent(s, s) += kt;
    if (s > 0) {
      out.force(s - 1) -= f;
      out.tangent(s - 1, s - 1) += kt;
      out.tangent(s, s - 1) -= kt;
      out.tangent(s - 1, s) -= kt;
    }
  }
  return out;
}

}  // namespace nds::dynamics
