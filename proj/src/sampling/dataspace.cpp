#include "nds/sampling/dataspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nds/common/error.hpp"

namespace nds::sampling {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

std::size_t SplitSizes::of(Split s) const noexcept {
  switch (s) {
    case Split::train: return train;
    case Split::val: return val;
    case Split::test: return test;
  }
  return 0;
}

bool Dataspace::is_linear() const noexcept {
  return std::visit([](const auto& p) { return p.cubic_coeff == 0.0; }, system);
}

void Dataspace::validate() const {
  if (n_terms == 0) throw InvalidArgument("dataspace: n_terms must be positive");
  for (const Range* r : {&amplitude, &frequency, &phase})
    if (!(r->lo <= r->hi)) throw InvalidArgument("dataspace: range bounds out of order");
  if (amplitude.lo < 0.0 || frequency.lo < 0.0 || phase.lo < 0.0 || phase.hi > 2.0 * kPi)
    throw InvalidArgument("dataspace: ranges outside the admissible domain");
  if (sizes.train == 0 || sizes.val == 0 || sizes.test == 0)
    throw InvalidArgument("dataspace: split sizes must be positive");
  grid.validate();
  if (is_mdof() && (response_dof < 1 || response_dof > dynamics::kMdofDofs))
    throw InvalidArgument("dataspace: response dof must be in 1..6");
  std::visit([](const auto& p) { p.validate(); }, system);
}

Dataspace make_dataspace(CaseId id, ResponseKind response, double cubic_ratio) {
  Dataspace s;
  s.case_id = id;
  s.response = response;
  s.phase = {0.0, 2.0 * kPi};
  s.sizes = {std::size_t{1} << 18, 5000, 5000};
  const dynamics::TimeGrid short_grid{5.0, 0.05, 1e-3};
  const dynamics::TimeGrid long_grid{20.0, 0.1, 1e-3};

  switch (id) {
    case CaseId::case1:
    case CaseId::case2:
    case CaseId::case3:
    case CaseId::case4: {
      const bool many_terms = id == CaseId::case2 || id == CaseId::case4;
      const bool long_window = id == CaseId::case3 || id == CaseId::case4;
      s.n_terms = many_terms ? 25 : 5;
      s.amplitude = {0.0, 10.0};
      s.frequency = {0.0, 6.0 * kPi};
      s.grid = long_window ? long_grid : short_grid;
      s.system = dynamics::SdofParams::reference();
      break;
    }
    case CaseId::case5: {
      s.n_terms = 25;
      s.amplitude = {0.0, 20.0};
      s.frequency = {0.0, 6.0 * kPi};
      s.grid = long_grid;
      s.sizes.train = std::size_t{1} << 20;
      auto p = dynamics::SdofParams::reference();
      p.cubic_coeff = cubic_ratio * p.stiffness;
      s.system = p;
      break;
    }
    case CaseId::case6:
    case CaseId::case7: {
      s.n_terms = 25;
      s.amplitude = {0.0, 4.0};
      s.frequency = {0.0, (id == CaseId::case6 ? 20.0 : 10.0) * kPi};
      s.grid = long_grid;
      s.sizes.train = std::size_t{1} << 20;
      auto p = dynamics::MdofParams::reference();
      if (id == CaseId::case7) p.cubic_coeff = cubic_ratio * p.story_stiffness();
      s.system = p;
      s.response_dof = 6;
      break;
    }
    default: throw InvalidArgument("unknown case id");
  }
  return s;
}

Dataspace case6_subrange(int band, ResponseKind response) {
  static constexpr Range kBands[] = {{0.0, 10.0 * kPi}, {10.0 * kPi, 15.0 * kPi},
                                     {15.0 * kPi, 20.0 * kPi}};
  if (band < 0 || band > 2) throw InvalidArgument("case6 band must be 0, 1 or 2");
  Dataspace s = make_dataspace(CaseId::case6, response);
  s.frequency = kBands[band];
  return s;
}

dynamics::HarmonicLoad draw_load_params(const Dataspace& space, std::span<const double> unit_row) {
  const std::size_t np = space.n_terms;
  if (unit_row.size() != 3 * np)
    throw InvalidArgument("draw_load_params: unit row length must be 3 * n_terms");
  dynamics::HarmonicLoad load;
  load.amplitudes.resize(np);
  load.frequencies.resize(np);
  load.phases.resize(np);
  for (std::size_t i = 0; i < np; ++i) {
    load.amplitudes[i] = space.amplitude.at(unit_row[i]);
    load.frequencies[i] = space.frequency.at(unit_row[np + i]);
    load.phases[i] =
        std::min(space.phase.at(unit_row[2 * np + i]), std::nextafter(2.0 * kPi, 0.0));
  }
  return load;
}

std::string to_string(CaseId id) { return "case" + std::to_string(static_cast<int>(id)); }

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

std::string to_string(ResponseKind r) {
  return r == ResponseKind::displacement ? "displacement" : "acceleration";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw InvalidArgument("unknown split: " + s);
}

ResponseKind response_from_string(const std::string& s) {
  if (s == "displacement") return ResponseKind::displacement;
  if (s == "acceleration") return ResponseKind::acceleration;
  throw InvalidArgument("unknown response kind: " + s);
}

}  // namespace nds::sampling
