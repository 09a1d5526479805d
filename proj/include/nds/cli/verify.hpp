#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nds::cli {

struct OracleCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string unit;

  bool pass() const { return value < tolerance; }
};

// Closed-form vs Newmark displacement and acceleration on Case-1 loads
// (max abs difference, natural units).
std::vector<OracleCheck> check_sdof_oracle(std::size_t n_loads, std::uint64_t seed);

// Modal superposition vs Newmark at the top floor on Case-6 loads (relative
// error in percent), plus the first two natural frequencies.
std::vector<OracleCheck> check_mdof_oracle(std::size_t n_loads, std::uint64_t seed);

// Equation-of-motion residual of the Case-5 (b = k) Newmark states and the
// finite-difference check of the cubic frame tangent.
std::vector<OracleCheck> check_nonlinear(std::size_t n_loads, std::uint64_t seed);

}  // namespace nds::cli
