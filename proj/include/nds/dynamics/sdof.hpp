#pragma once

#include <vector>

#include "nds/dynamics/load.hpp"
#include "nds/dynamics/response.hpp"
#include "nds/dynamics/time_grid.hpp"

namespace nds::dynamics {

struct SdofParams {
  double mass = 0.0;         // kg
  double damping = 0.0;      // kg/s
  double stiffness = 0.0;    // kg/s^2
  double cubic_coeff = 0.0;  // kg/(s^2 m^2)

  double natural_freq() const;
  double damping_ratio() const;
  void validate() const;

  // m = 13.5 kg, T_n = 0.5 s, xi = 0.02.
  static SdofParams reference(double cubic_coeff = 0.0);
};

// Closed-form coefficients of the response of a damped oscillator
//   u'' + 2 xi wn u' + wn^2 u = gain * p(t) / stiffness_scale
// from rest under a harmonic load. The SDOF system uses gain 1 and
// stiffness_scale k; each shear-frame mode reuses it with its participation
// factor as gain and wn^2 as stiffness_scale.
struct OscillatorCoeffs {
  double decay = 0.0;        // rho = xi * wn
  double damped_freq = 0.0;  // zeta = wn sqrt(1 - xi^2)
  double A = 0.0;
  double B = 0.0;
  std::vector<double> frequencies;
  std::vector<double> C, D, E, F;

  double displacement(double t) const noexcept;
  double velocity(double t) const noexcept;
  double acceleration(double t) const noexcept;
};

using SdofAnalyticCoeffs = OscillatorCoeffs;

OscillatorCoeffs oscillator_coeffs(double natural_freq, double damping_ratio, double gain,
                                   double stiffness_scale, const HarmonicLoad& load);

SdofAnalyticCoeffs sdof_coeffs(const SdofParams& params, const HarmonicLoad& load);

// Analytical response of the linear SDOF system from rest. Requires an
// underdamped system with cubic_coeff == 0.
ResponseSeries sdof_linear_response(const SdofParams& params, const HarmonicLoad& load,
                                    const TimeGrid& grid);

}  // namespace nds::dynamics
