#pragma once

#include <cstddef>

namespace nds::dynamics {

// Observation grid t_k = k * obs_step, k = 0..n_points-1, plus the finer
// step used by the time integrator.
struct TimeGrid {
  double duration = 5.0;
  double obs_step = 0.05;
  double fine_step = 1e-3;

  std::size_t n_points() const;
  // Number of integrator steps between two observation instants.
  std::size_t substeps() const;
  std::size_t n_fine_steps() const { return (n_points() - 1) * substeps(); }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * obs_step; }
  void validate() const;
};

}  // namespace nds::dynamics
