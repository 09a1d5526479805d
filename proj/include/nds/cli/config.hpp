#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nds/sampling/dataspace.hpp"
#include "nds/sparse/sparsify.hpp"
#include "nds/train/train.hpp"

namespace nds::cli {

// Config file problems (bad JSON, unknown keys, wrong types, invalid values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct DataspaceConfig {
  int case_id = 1;
  std::string response = "displacement";
  int response_dof = 6;
  int subrange = 0;  // Case-6 frequency band 1..3, 0 = full range
  std::optional<std::size_t> n_train, n_val, n_test;
  std::optional<std::size_t> n_terms;
  std::optional<std::vector<double>> amplitude, frequency, phase;
  std::optional<double> duration, obs_step, fine_step;
};

struct ModelConfig {
  std::string template_name = "dense";  // dense | conv_dense | sparse
  std::size_t n_fc = 1;
  std::size_t n_l = 1;
  std::size_t n_c = 16;
  std::string bn_mode = "per_height";
  double bn_eps = 1e-8;
  std::string precision = "float";
};

struct PathsConfig {
  std::string data_dir = "data";
  std::string model = "model";
  std::string reports = "reports";
  std::string mask;
};

struct RunConfig {
  std::uint64_t seed = 0;
  DataspaceConfig dataspace;
  double cubic_ratio = 1.0;  // b / k for the nonlinear cases
  ModelConfig model;
  train::TrainConfig train;
  std::optional<std::size_t> phase1_epochs, phase2_epochs;
  PathsConfig paths;

  // Fully resolved dataspace, with size and range overrides applied.
  sampling::Dataspace make_dataspace() const;
  sparse::TemplateOptions template_options() const;
  nlohmann::json to_json() const;
  void validate() const;
};

// Unknown keys anywhere in the document are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace nds::cli
