#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "nds/nn/mask.hpp"

namespace nds::nn {

enum class Activation { linear, relu };
enum class BnParamMode { per_height, per_element };
enum class Phase { train, eval };

struct FcSpec {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::linear;
};

// Fully connected layer whose weights outside the mask are fixed at zero.
struct ScSpec {
  std::shared_ptr<const BitMask> mask;
  Activation activation = Activation::linear;
};

// 1-D convolution with "same" padding: (H-1)s + f - H zeros in total, the
// smaller half before the signal.
struct ConvSpec {
  std::size_t filter_size = 2;
  std::size_t stride = 1;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  Activation activation = Activation::relu;
};

struct BnSpec {
  BnParamMode mode = BnParamMode::per_height;
  double eps = 1e-8;
};

using LayerKind = std::variant<FcSpec, ScSpec, ConvSpec, BnSpec>;

struct LayerSpec {
  std::string name;
  LayerKind kind;
};

struct Shape {
  std::size_t height = 0;
  std::size_t channels = 1;
  bool operator==(const Shape&) const = default;
};

struct ModelSpec {
  Shape input;
  std::vector<LayerSpec> layers;

  // Output shape of every layer, in order. Throws ShapeError when the chain
  // is inconsistent or a layer is malformed.
  std::vector<Shape> infer_shapes() const;
  Shape output_shape() const;
  std::size_t index_of(const std::string& layer_name) const;
};

const char* kind_name(const LayerKind& kind);
std::size_t conv_pad_before(const ConvSpec& conv);

struct LayerCount {
  std::string name;
  std::string kind;
  std::size_t trainable = 0;
  // Trainable plus stored population statistics (BN only).
  std::size_t listed = 0;
};

struct ParamCount {
  std::vector<LayerCount> layers;
  std::size_t total_trainable = 0;
  std::size_t total_listed = 0;
};

ParamCount param_count(const ModelSpec& spec);

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

}  // namespace nds::nn
