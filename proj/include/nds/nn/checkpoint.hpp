#pragma once

#include <filesystem>

#include "nds/nn/model.hpp"

namespace nds::nn {

// "NCK1" parameter file: values stored as float64 regardless of T.
template <typename T>
void write_checkpoint(const std::filesystem::path& path, const Model<T>& model);

// Reads all parameter records.
ParamStore<double> read_checkpoint(const std::filesystem::path& path);

// JSON model description (layer records).
template <typename T>
void write_model_description(const std::filesystem::path& path, const Model<T>& model);

struct ModelDescription {
  ModelSpec spec;
  bool bn_finalized = false;
};
ModelDescription read_model_description(const std::filesystem::path& path);

// Rebuilds a model from its description and checkpoint.
template <typename T>
Model<T> load_model(const std::filesystem::path& description, const std::filesystem::path& checkpoint);

}  // namespace nds::nn
