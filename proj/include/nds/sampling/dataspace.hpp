#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include "nds/dynamics/load.hpp"
#include "nds/dynamics/mdof.hpp"
#include "nds/dynamics/sdof.hpp"
#include "nds/dynamics/time_grid.hpp"

namespace nds::sampling {

enum class CaseId : std::uint32_t { case1 = 1, case2, case3, case4, case5, case6, case7 };
enum class Split : std::uint32_t { train = 0, val = 1, test = 2 };
enum class ResponseKind : std::uint32_t { displacement = 0, acceleration = 1 };

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double at(double unit) const noexcept { return lo + unit * (hi - lo); }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
  std::size_t of(Split s) const noexcept;
};

using SystemParams = std::variant<dynamics::SdofParams, dynamics::MdofParams>;

struct Dataspace {
  CaseId case_id = CaseId::case1;
  std::size_t n_terms = 5;
  Range amplitude;
  Range frequency;
  Range phase;
  dynamics::TimeGrid grid;
  SplitSizes sizes;
  SystemParams system;
  ResponseKind response = ResponseKind::displacement;
  int response_dof = 6;  // MDOF only, 1-based

  bool is_mdof() const noexcept { return std::holds_alternative<dynamics::MdofParams>(system); }
  bool is_linear() const noexcept;
  std::size_t n_points() const { return grid.n_points(); }
  // Length of a unit row for draw_load_params: [a_1..a_Np, w_1..w_Np, phi_1..phi_Np].
  std::size_t n_unit_dims() const noexcept { return 3 * n_terms; }
  void validate() const;
};

// Table values for Case-1..7. `cubic_coeff` is a multiple of the linear
// stiffness for the nonlinear cases (default b = k) and ignored otherwise.
Dataspace make_dataspace(CaseId id, ResponseKind response = ResponseKind::displacement,
                         double cubic_ratio = 1.0);

// Case-6 restricted to one of the frequency bands [0,10pi], [10pi,15pi], [15pi,20pi].
Dataspace case6_subrange(int band, ResponseKind response = ResponseKind::displacement);

dynamics::HarmonicLoad draw_load_params(const Dataspace& space, std::span<const double> unit_row);

std::string to_string(CaseId id);
std::string to_string(Split s);
std::string to_string(ResponseKind r);
Split split_from_string(const std::string& s);
ResponseKind response_from_string(const std::string& s);

}  // namespace nds::sampling
