#include "nds/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nds/dynamics/mdof.hpp"
#include "nds/dynamics/newmark.hpp"
#include "nds/dynamics/sdof.hpp"
#include "nds/sampling/dataset.hpp"

namespace nds::cli {

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double rel_err_pct(const std::vector<double>& y, const std::vector<double>& yh) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num += (y[i] - yh[i]) * (y[i] - yh[i]);
    den += y[i] * y[i];
  }
  return den > 0 ? 100.0 * std::sqrt(num / den) : 0.0;
}

}  // namespace

std::vector<OracleCheck> check_sdof_oracle(std::size_t n_loads, std::uint64_t seed) {
  const auto space = sampling::make_dataspace(sampling::CaseId::case1);
  const auto& p = std::get<dynamics::SdofParams>(space.system);
  double du = 0, da = 0;
  for (std::size_t i = 0; i < n_loads; ++i) {
    const auto load = sampling::sample_load(space, sampling::Split::test, seed, i, n_loads);
    const auto a = dynamics::sdof_linear_response(p, load, space.grid);
    const auto n = dynamics::sdof_newmark_response(p, load, space.grid);
    du = std::max(du, max_abs_diff(a.displacement, n.displacement));
    da = std::max(da, max_abs_diff(a.acceleration, n.acceleration));
  }
  return {{"sdof displacement max |analytic - newmark|", du, 1e-4, "m"},
          {"sdof acceleration max |analytic - newmark|", da, 1e-4, "m/s^2"}};
}

std::vector<OracleCheck> check_mdof_oracle(std::size_t n_loads, std::uint64_t seed) {
  const auto space = sampling::make_dataspace(sampling::CaseId::case6);
  const auto sys = dynamics::build_mdof_system(std::get<dynamics::MdofParams>(space.system));
  double eu = 0, ea = 0;
  for (std::size_t i = 0; i < n_loads; ++i) {
    const auto load = sampling::sample_load(space, sampling::Split::test, seed, i, n_loads);
    const auto a = dynamics::mdof_linear_response(sys, load, space.grid, 6);
    const auto n = dynamics::mdof_newmark_response(sys, load, space.grid, 6);
    eu = std::max(eu, rel_err_pct(a.displacement, n.displacement));
    ea = std::max(ea, rel_err_pct(a.acceleration, n.acceleration));
  }
  const auto& w = sys.modal.natural_freqs;
  return {{"mdof dof-6 displacement max relative error", eu, 0.5, "%"},
          {"mdof dof-6 acceleration max relative error", ea, 0.5, "%"},
          {"first natural frequency deviation from 15.73 rad/s", 100.0 * std::abs(w(0) / 15.73 - 1.0), 0.5, "%"},
          {"second natural frequency deviation from 44.16 rad/s", 100.0 * std::abs(w(1) / 44.16 - 1.0), 0.5, "%"}};
}

std::vector<OracleCheck> check_nonlinear(std::size_t n_loads, std::uint64_t seed) {
  const auto space = sampling::make_dataspace(sampling::CaseId::case5, sampling::ResponseKind::displacement, 1.0);
  const auto& p = std::get<dynamics::SdofParams>(space.system);
  const auto sys = dynamics::sdof_system(p);
  double worst = 0;
  for (std::size_t i = 0; i < n_loads; ++i) {
    const auto load = sampling::sample_load(space, sampling::Split::test, seed, i, n_loads);
    const auto res = dynamics::newmark_integrate(
        sys, [&](double t) { return Eigen::VectorXd::Constant(1, load(t)); }, space.grid);
    for (Eigen::Index k = 0; k < res.displacement.rows(); ++k) {
      const double u = res.displacement(k, 0), v = res.velocity(k, 0), a = res.acceleration(k, 0);
      const double r = p.mass * a + p.damping * v + p.stiffness * u + p.cubic_coeff * u * u * u -
                       load(space.grid.time(static_cast<std::size_t>(k)));
      worst = std::max(worst, std::abs(r));
    }
  }

  const auto mp = dynamics::MdofParams::reference(dynamics::MdofParams::reference().story_stiffness());
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 0.01);
  double tangent = 0;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd u(dynamics::kMdofDofs);
    for (int i = 0; i < u.size(); ++i) u(i) = nd(gen);
    const auto f = dynamics::mdof_internal_force(mp, u);
    for (int j = 0; j < u.size(); ++j) {
      const double h = 1e-6 * std::max(1e-3, std::abs(u(j)));
      Eigen::VectorXd up = u, um = u;
      up(j) += h;
      um(j) -= h;
      const Eigen::VectorXd col =
          (dynamics::mdof_internal_force(mp, up).force - dynamics::mdof_internal_force(mp, um).force) / (2 * h);
      tangent = std::max(tangent, (col - f.tangent.col(j)).norm() / f.tangent.col(j).norm());
    }
  }
  return {{"case-5 equation-of-motion residual", worst, 1e-6, "N"},
          {"mdof cubic tangent vs finite differences", tangent, 1e-6, "relative"}};
}

}  // namespace nds::cli
