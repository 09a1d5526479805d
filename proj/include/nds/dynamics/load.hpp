#pragma once

#include <cstddef>
#include <vector>

namespace nds::dynamics {

// One realization of a harmonic load: sum_i a_i sin(w_i t + phi_i).
// Amplitudes are forces (N) for SDOF systems and ground accelerations (m/s^2)
// for the shear frame.
struct HarmonicLoad {
  std::vector<double> amplitudes;
  std::vector<double> frequencies;  // rad/s
  std::vector<double> phases;       // rad

  std::size_t n_terms() const noexcept { return amplitudes.size(); }
  double operator()(double t) const noexcept;
  void validate() const;
};

double eval_load(const HarmonicLoad& load, double t) noexcept;

// Scaled copies and superposition, used for linearity checks. Negative
// scale factors are folded into the phases so amplitudes stay >= 0.
HarmonicLoad scaled(const HarmonicLoad& load, double factor);
HarmonicLoad superpose(const HarmonicLoad& a, const HarmonicLoad& b);

}  // namespace nds::dynamics
