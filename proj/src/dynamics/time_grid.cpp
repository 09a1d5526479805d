#include "nds/dynamics/time_grid.hpp"

#include <cmath>

#include "nds/common/error.hpp"

namespace nds::dynamics {

namespace {

// Returns round(a / b) after checking that b divides a to within rounding.
std::size_t exact_ratio(double a, double b, const char* what) {
  const double r = a / b;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, n))
    throw InvalidArgument(std::string("time grid: ") + what);
  return static_cast<std::size_t>(n);
}

}  // namespace

std::size_t TimeGrid::n_points() const {
  return exact_ratio(duration, obs_step, "obs_step must divide duration") + 1;
}

std::size_t TimeGrid::substeps() const {
  return exact_ratio(obs_step, fine_step, "fine_step must divide obs_step");
}

void TimeGrid::validate() const {
  if (!(duration > 0.0) || !(obs_step > 0.0) || !(fine_step > 0.0))
    throw InvalidArgument("time grid: steps and duration must be positive");
  (void)n_points();
  (void)substeps();
}

}  // namespace nds::dynamics
