#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "nds/common/matrix.hpp"
#include "nds/common/parallel.hpp"
#include "nds/sampling/dataspace.hpp"

namespace nds::sampling {

struct DatasetMeta {
  CaseId case_id = CaseId::case1;
  Split split = Split::train;
  std::uint64_t seed = 0;
  std::uint32_t n_terms = 0;
  bool operator==(const DatasetMeta&) const = default;
};

// Paired load (X) and response (Y) series, one sample per row.
struct Dataset {
  MatrixD X;
  MatrixD Y;
  DatasetMeta meta;

  std::size_t n_samples() const noexcept { return X.rows(); }
  std::size_t n_points() const noexcept { return X.cols(); }
  bool operator==(const Dataset&) const = default;
};

// Design rows come from a Latin hypercube sized by the dataspace's split size
// (or by size_override when it is larger), so a smaller override reproduces
// the leading rows of the full design.
Dataset generate_dataset(const Dataspace& space, Split split, std::uint64_t seed,
                         std::optional<std::size_t> size_override = std::nullopt,
                         Exec exec = Exec::parallel);

// Load parameters of sample `index` of the given split, without generating responses.
dynamics::HarmonicLoad sample_load(const Dataspace& space, Split split, std::uint64_t seed,
                                   std::size_t index, std::size_t design_size);

// Response series of one load for the configured system and response kind.
std::vector<double> response_row(const Dataspace& space, const dynamics::HarmonicLoad& load);

struct NormStats {
  std::vector<double> mean;
  std::vector<double> var;
  double eps = 1e-8;

  std::size_t size() const noexcept { return mean.size(); }
  bool operator==(const NormStats&) const = default;
};

NormStats compute_norm_stats(const MatrixD& data, double eps = 1e-8);
std::pair<NormStats, NormStats> compute_norm_stats(const Dataset& train, double eps = 1e-8);

enum class Direction { forward, inverse };

MatrixD normalize(const MatrixD& data, const NormStats& stats, Direction dir = Direction::forward);

}  // namespace nds::sampling
