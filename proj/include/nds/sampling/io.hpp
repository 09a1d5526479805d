#pragma once

#include <filesystem>

#include "nds/sampling/dataset.hpp"

namespace nds::sampling {

// "NDS1" little-endian container; see README for the byte layout.
void write_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& path);

// "NST1" container.
void write_norm_stats(const std::filesystem::path& path, const NormStats& stats);
NormStats read_norm_stats(const std::filesystem::path& path);

// One sample as CSV with columns t, p, u, a.
void write_sample_csv(const std::filesystem::path& path, const Dataspace& space,
                      const dynamics::HarmonicLoad& load);

}  // namespace nds::sampling
