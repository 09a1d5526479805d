#include "nds/dynamics/sdof.hpp"

#include <cmath>
#include <numbers>

#include "nds/common/error.hpp"

namespace nds::dynamics {

double SdofParams::natural_freq() const { return std::sqrt(stiffness / mass); }

double SdofParams::damping_ratio() const { return damping / (2.0 * mass * natural_freq()); }

void SdofParams::validate() const {
  if (!(mass > 0.0)) throw InvalidArgument("sdof: mass must be positive");
  if (!(stiffness > 0.0)) throw InvalidArgument("sdof: stiffness must be positive");
  if (!(damping >= 0.0)) throw InvalidArgument("sdof: damping must be non-negative");
  if (!(cubic_coeff >= 0.0)) throw InvalidArgument("sdof: cubic coefficient must be non-negative");
}

SdofParams SdofParams::reference(double cubic_coeff) {
  constexpr double m = 13.5;
  constexpr double wn = 2.0 * std::numbers::pi / 0.5;
  constexpr double xi = 0.02;
  return {m, 2.0 * m * wn * xi, m * wn * wn, cubic_coeff};
}

OscillatorCoeffs oscillator_coeffs(double natural_freq, double damping_ratio, double gain,
                                   double stiffness_scale, const HarmonicLoad& load) {
  if (!(damping_ratio < 1.0))
    throw InvalidArgument("oscillator is not underdamped; closed form undefined");
  const double wn = natural_freq;
  const double xi = damping_ratio;
  OscillatorCoeffs out;
  out.decay = xi * wn;
  out.damped_freq = wn * std::sqrt(1.0 - xi * xi);
  const std::size_t np = load.n_terms();
  out.frequencies = load.frequencies;
  out.C.resize(np);
  out.D.resize(np);
  out.E.resize(np);
  out.F.resize(np);

  double sum_cos_part = 0.0;  // sum of D_j + F_j
  double sum_sin_part = 0.0;  // sum of w_j (C_j + E_j)
  for (std::size_t j = 0; j < np; ++j) {
    const double r = load.frequencies[j] / wn;
    const double one_minus_r2 = 1.0 - r * r;
    const double two_xi_r = 2.0 * xi * r;
    const double den = one_minus_r2 * one_minus_r2 + two_xi_r * two_xi_r;
    const double scale = gain * load.amplitudes[j] / stiffness_scale / den;
    const double cp = std::cos(load.phases[j]);
    const double sp = std::sin(load.phases[j]);
    out.C[j] = scale * cp * one_minus_r2;
    out.D[j] = scale * cp * (-two_xi_r);
    out.E[j] = scale * sp * two_xi_r;
    out.F[j] = scale * sp * one_minus_r2;
    sum_cos_part += out.D[j] + out.F[j];
    sum_sin_part += load.frequencies[j] * (out.C[j] + out.E[j]);
  }
  // u(0) = 0 and u'(0) = 0.
  out.A = -sum_cos_part;
  out.B = (out.decay * out.A - sum_sin_part) / out.damped_freq;
  return out;
}

double OscillatorCoeffs::displacement(double t) const noexcept {
  const double e = std::exp(-decay * t);
  double u = e * (A * std::cos(damped_freq * t) + B * std::sin(damped_freq * t));
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const double wt = frequencies[j] * t;
    u += (C[j] + E[j]) * std::sin(wt) + (D[j] + F[j]) * std::cos(wt);
  }
  return u;
}

double OscillatorCoeffs::velocity(double t) const noexcept {
  const double e = std::exp(-decay * t);
  const double c = std::cos(damped_freq * t);
  const double s = std::sin(damped_freq * t);
  double v = -decay * e * (A * c + B * s) + e * damped_freq * (-A * s + B * c);
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const double w = frequencies[j];
    v += w * ((C[j] + E[j]) * std::cos(w * t) - (D[j] + F[j]) * std::sin(w * t));
  }
  return v;
}

double OscillatorCoeffs::acceleration(double t) const noexcept {
  const double e = std::exp(-decay * t);
  const double z = damped_freq;
  const double c = std::cos(z * t);
  const double s = std::sin(z * t);
  double a = decay * decay * e * (A * c + B * s) - 2.0 * decay * e * (-A * z * s + B * z * c) +
             e * (-A * z * z * c - B * z * z * s);
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const double w = frequencies[j];
    a += -(C[j] + E[j]) * w * w * std::sin(w * t) - (D[j] + F[j]) * w * w * std::cos(w * t);
  }
  return a;
}

SdofAnalyticCoeffs sdof_coeffs(const SdofParams& params, const HarmonicLoad& load) {
  params.validate();
  if (params.damping * params.damping >= 4.0 * params.mass * params.stiffness)
    throw InvalidArgument("sdof: analytical solution requires c^2 < 4mk");
  return oscillator_coeffs(params.natural_freq(), params.damping_ratio(), 1.0, params.stiffness,
                           load);
}

ResponseSeries sdof_linear_response(const SdofParams& params, const HarmonicLoad& load,
                                    const TimeGrid& grid) {
  if (params.cubic_coeff != 0.0)
    throw InvalidArgument("sdof: analytical solution needs cubic_coeff == 0");
  load.validate();
  const auto coeffs = sdof_coeffs(params, load);
  const std::size_t n = grid.n_points();
  ResponseSeries out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.time(k);
    out.displacement[k] = k == 0 ? 0.0 : coeffs.displacement(t);
    out.acceleration[k] = coeffs.acceleration(t);
  }
  return out;
}

}  // namespace nds::dynamics
