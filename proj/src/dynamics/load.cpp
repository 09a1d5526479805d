#include "nds/dynamics/load.hpp"

#include <cmath>
#include <numbers>

#include "nds/common/error.hpp"

namespace nds::dynamics {

double HarmonicLoad::operator()(double t) const noexcept {
  double p = 0.0;
  for (std::size_t i = 0; i < amplitudes.size(); ++i)
    p += amplitudes[i] * std::sin(frequencies[i] * t + phases[i]);
  return p;
}

double eval_load(const HarmonicLoad& load, double t) noexcept { return load(t); }

void HarmonicLoad::validate() const {
  if (frequencies.size() != amplitudes.size() || phases.size() != amplitudes.size())
    throw InvalidArgument("harmonic load: amplitude/frequency/phase lengths differ");
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (!(amplitudes[i] >= 0.0)) throw InvalidArgument("harmonic load: negative amplitude");
    if (!(frequencies[i] >= 0.0)) throw InvalidArgument("harmonic load: negative frequency");
    if (!(phases[i] >= 0.0 && phases[i] < 2.0 * std::numbers::pi))
      throw InvalidArgument("harmonic load: phase outside [0, 2pi)");
  }
}

HarmonicLoad scaled(const HarmonicLoad& load, double factor) {
  HarmonicLoad out = load;
  const double shift = factor < 0.0 ? std::numbers::pi : 0.0;
  for (std::size_t i = 0; i < out.n_terms(); ++i) {
    out.amplitudes[i] *= std::abs(factor);
    out.phases[i] = std::fmod(out.phases[i] + shift, 2.0 * std::numbers::pi);
  }
  return out;
}

HarmonicLoad superpose(const HarmonicLoad& a, const HarmonicLoad& b) {
  HarmonicLoad out = a;
  out.amplitudes.insert(out.amplitudes.end(), b.amplitudes.begin(), b.amplitudes.end());
  out.frequencies.insert(out.frequencies.end(), b.frequencies.begin(), b.frequencies.end());
  out.phases.insert(out.phases.end(), b.phases.begin(), b.phases.end());
  return out;
}

}  // namespace nds::dynamics
