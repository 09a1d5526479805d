#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nds/common/matrix.hpp"
#include "nds/nn/mask.hpp"
#include "nds/nn/model.hpp"
#include "nds/train/train.hpp"

namespace nds::sparse {

enum class PatternKind { lower_triangular, banded_lower, none };

std::string to_string(PatternKind k);

struct SparsityReport {
  double ratio = 0.05;
  double max_abs = 0.0;
  double threshold = 0.0;  // ratio * max|W|
  std::size_t nnz = 0;
  double lower_fraction = 0.0;  // surviving entries with i >= j
  std::size_t max_lower_offset = 0;
  std::size_t band_width = 0;  // 99th percentile of surviving i - j (i >= j)
  // Survivors per diagonal offset i - j, index offset + cols - 1.
  std::vector<std::size_t> histogram;
  std::size_t rows = 0;
  std::size_t cols = 0;

  nlohmann::json to_json() const;
};

// Keeps |W[i,j]| >= ratio * max|W|. Throws on an all-zero or empty matrix.
std::pair<nn::BitMask, SparsityReport> sparsity_mask(const MatrixD& W, double ratio = 0.05);

// keep i >= j, or 0 <= i - j <= band_width.
nn::BitMask structured_mask(PatternKind kind, std::size_t n, std::size_t band_width = 0);

struct FittedPattern {
  PatternKind kind = PatternKind::none;
  std::size_t band_width = 0;
};

// lower_triangular when >= 99% of survivors sit on or below the diagonal and
// they reach down at least 0.9 n; banded_lower with the 99th-percentile
// offset when >= 95% sit below; none otherwise.
FittedPattern fit_pattern(const SparsityReport& report);

MatrixD weight_matrix(const nn::ParamStore<double>& params, const std::string& layer);

void write_mask(const std::filesystem::path& path, const nn::BitMask& mask);
nn::BitMask read_mask(const std::filesystem::path& path);

// Masked weights and biases taken from a trained FC layer.
struct ScTransfer {
  std::shared_ptr<const nn::BitMask> mask;
  std::vector<double> weights;
  std::vector<double> biases;
};

ScTransfer build_sc_from_fc(const nn::ParamStore<double>& fc_params, const std::string& fc_layer,
                            std::shared_ptr<const nn::BitMask> mask);

struct TemplateOptions {
  std::size_t n_c = 16;
  nn::BnParamMode bn_mode = nn::BnParamMode::per_height;
  double bn_eps = 1e-8;
};

// CONV(2, 1->n_c, relu) [BN CONV(2, n_c->n_c, relu)] x (n_l - 1) BN CONV(1, n_c->1) SC
nn::ModelSpec build_sparse_template(std::size_t n, std::size_t n_l,
                                    std::shared_ptr<const nn::BitMask> mask,
                                    const TemplateOptions& opt = {});

// Same CONV stack followed by FC(relu) x (n_fc_remaining - 1) and a linear FC.
// FC layers are named fc2.. so they line up with a dense model's retained
// layers. n_l = 0 gives the dense model itself.
nn::ModelSpec build_conv_dense_template(std::size_t n, std::size_t n_l,
                                        std::size_t n_fc_remaining,
                                        const TemplateOptions& opt = {});

// FC(relu) x (n_fc - 1) then a linear FC, named fc1..fcN.
nn::ModelSpec build_dense_model(std::size_t n, std::size_t n_fc);

// Initializes a sparse template and loads the transferred SC parameters.
template <typename T>
nn::Model<T> make_sparse_model(const nn::ModelSpec& spec, const ScTransfer& sc,
                               std::uint64_t seed);

struct GrowthPlan {
  std::size_t target_n_l = 2;
  std::size_t n_c = 16;
  std::size_t phase1_epochs = 0;
  std::size_t phase2_epochs = 0;
};

// Half the epochs per phase, the remainder going to phase 2.
GrowthPlan default_growth_plan(std::size_t target_n_l, std::size_t epochs, std::size_t n_c = 16);

std::size_t count_bn_layers(const nn::ModelSpec& spec);

template <typename T>
struct Grown {
  nn::Model<T> model;
  std::vector<std::string> new_layers;
};

// Inserts CONV(2, n_c->n_c, relu) + BN right after the first BN layer. Old
// parameters are copied bit for bit; new ones are drawn from `seed`.
template <typename T>
Grown<T> insert_bn_conv(const nn::Model<T>& model, std::uint64_t seed);

// Phase 1 trains only the parameters of `new_layers`; phase 2 frees
// everything (except config.frozen_params). The trainer's Adam moments
// persist from phase 1 into phase 2.
template <typename T>
train::History two_phase_train(nn::Model<T>& model, const std::vector<std::string>& new_layers,
                               const train::TrainData<T>& train_set,
                               const std::type_identity_t<train::TrainData<T>>* val_set,
                               const train::TrainConfig& config, std::size_t phase1_epochs,
                               std::size_t phase2_epochs, Exec exec = Exec::parallel);

}  // namespace nds::sparse
