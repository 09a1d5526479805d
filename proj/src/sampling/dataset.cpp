#include "nds/sampling/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

#include "nds/common/error.hpp"
#include "nds/common/rng.hpp"
#include "nds/dynamics/newmark.hpp"
#include "nds/sampling/lhs.hpp"

namespace nds::sampling {

namespace {

std::uint64_t split_stream(std::uint64_t seed, Split split, CaseId id) {
  return hash_keys({seed, static_cast<std::uint64_t>(split), static_cast<std::uint64_t>(id)});
}

// Shared per-dataset state: the frame's modes are computed once.
struct Generator {
  const Dataspace& space;
  std::optional<dynamics::MdofSystem> mdof;

  explicit Generator(const Dataspace& s) : space(s) {
    if (s.is_mdof()) mdof = dynamics::build_mdof_system(std::get<dynamics::MdofParams>(s.system));
  }

  std::vector<double> response(const dynamics::HarmonicLoad& load) const {
    using namespace dynamics;
    ResponseSeries r;
    if (mdof) {
      r = space.is_linear() ? mdof_linear_response(*mdof, load, space.grid, space.response_dof)
                            : mdof_newmark_response(*mdof, load, space.grid, space.response_dof);
    } else {
      const auto& p = std::get<SdofParams>(space.system);
      r = space.is_linear() ? sdof_linear_response(p, load, space.grid)
                            : sdof_newmark_response(p, load, space.grid);
    }
    return space.response == ResponseKind::displacement ? std::move(r.displacement)
                                                        : std::move(r.acceleration);
  }

  void fill_row(std::size_t i, std::uint64_t stream, std::size_t design, MatrixD& X,
                MatrixD& Y) const {
    std::vector<double> unit(space.n_unit_dims());
    lhs_row(i, design, stream, unit);
    const auto load = draw_load_params(space, unit);
    auto x = X.row(i);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = load(space.grid.time(k));
    const auto y = response(load);
    std::copy(y.begin(), y.end(), Y.row(i).begin());
  }
};

}  // namespace

dynamics::HarmonicLoad sample_load(const Dataspace& space, Split split, std::uint64_t seed,
                                   std::size_t index, std::size_t design_size) {
  std::vector<double> unit(space.n_unit_dims());
  lhs_row(index, design_size, split_stream(seed, split, space.case_id), unit);
  return draw_load_params(space, unit);
}

std::vector<double> response_row(const Dataspace& space, const dynamics::HarmonicLoad& load) {
  return Generator(space).response(load);
}

Dataset generate_dataset(const Dataspace& space, Split split, std::uint64_t seed,
                         std::optional<std::size_t> size_override, Exec exec) {
  space.validate();
  const std::size_t configured = space.sizes.of(split);
  const std::size_t n_rows = size_override.value_or(configured);
  if (n_rows == 0) throw InvalidArgument("generate_dataset: zero samples requested");
  const std::size_t design = std::max(configured, n_rows);
  const std::size_t n = space.n_points();
  const std::uint64_t stream = split_stream(seed, split, space.case_id);

  Dataset out;
  out.X = MatrixD(n_rows, n);
  out.Y = MatrixD(n_rows, n);
  out.meta = {space.case_id, split, seed, static_cast<std::uint32_t>(space.n_terms)};

  const Generator gen(space);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n_rows; ++i) {
      try {
        gen.fill_row(i, stream, design, out.X, out.Y);
      } catch (const std::exception& e) {
        throw Error("sample " + std::to_string(i) + ": " + e.what());
      }
    }
    return out;
  }

  // Exceptions cannot leave the parallel region; keep the lowest failing index.
  std::size_t failed = std::numeric_limits<std::size_t>::max();
  std::string message;
  std::mutex mu;
  const auto rows = static_cast<std::ptrdiff_t>(n_rows);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    try {
      gen.fill_row(static_cast<std::size_t>(i), stream, design, out.X, out.Y);
    } catch (const std::exception& e) {
      std::lock_guard lock(mu);
      if (static_cast<std::size_t>(i) < failed) {
        failed = static_cast<std::size_t>(i);
        message = e.what();
      }
    }
  }
  if (!message.empty()) throw Error("sample " + std::to_string(failed) + ": " + message);
  return out;
}

NormStats compute_norm_stats(const MatrixD& data, double eps) {
  if (data.rows() == 0) throw InvalidArgument("compute_norm_stats: empty data");
  const std::size_t n = data.cols();
  const double count = static_cast<double>(data.rows());
  NormStats s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), eps};
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t c = 0; c < n; ++c) s.mean[c] += data(r, c);
  for (auto& m : s.mean) m /= count;
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const double d = data(r, c) - s.mean[c];
      s.var[c] += d * d;
    }
  for (auto& v : s.var) v /= count;
  return s;
}

std::pair<NormStats, NormStats> compute_norm_stats(const Dataset& train, double eps) {
  return {compute_norm_stats(train.X, eps), compute_norm_stats(train.Y, eps)};
}

MatrixD normalize(const MatrixD& data, const NormStats& stats, Direction dir) {
  if (data.cols() != stats.size()) throw ShapeError("normalize: column count differs from stats");
  MatrixD out = data;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double scale = std::sqrt(stats.var[c] + stats.eps);
      row[c] = dir == Direction::forward ? (row[c] - stats.mean[c]) / scale
                                         : row[c] * scale + stats.mean[c];
    }
  }
  return out;
}

}  // namespace nds::sampling
