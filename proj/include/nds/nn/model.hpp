#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nds/common/parallel.hpp"
#include "nds/nn/params.hpp"
#include "nds/nn/spec.hpp"
#include "nds/nn/tensor.hpp"

namespace nds::nn {

template <typename T>
class Layer;

template <typename T>
T relu(T x) noexcept {
  return x > T{0} ? x : T{0};
}

// A sequential network built from a ModelSpec. Owns its parameters and the
// activations cached by the last forward pass.
template <typename T>
class Model {
 public:
  explicit Model(ModelSpec spec);
  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept;
  Model& operator=(Model&&) noexcept;
  ~Model();

  const ModelSpec& spec() const noexcept { return spec_; }
  ParamStore<T>& params() noexcept { return params_; }
  const ParamStore<T>& params() const noexcept { return params_; }
  // Parameter indices owned by a layer.
  std::vector<std::size_t> layer_params(std::size_t layer) const;
  std::vector<std::size_t> layer_params(const std::string& layer_name) const;

  // Evaluates the network. Eval phase requires finalized BN population
  // statistics when the model contains BN layers.
  Tensor<T> forward(const Tensor<T>& x, Phase phase, Exec exec = Exec::parallel);

  // Back-propagates dL/d(output) of the last forward call, overwriting
  // `grads` (resized as needed), and returns dL/d(input).
  Tensor<T> backward(const Tensor<T>& d_output, Gradients<T>& grads, Exec exec = Exec::parallel);

  Gradients<T> zero_gradients() const;

  bool has_batch_norm() const noexcept;
  bool bn_finalized() const noexcept { return bn_finalized_; }
  void set_bn_finalized(bool v) noexcept { bn_finalized_ = v; }

  // Population statistics of every BN layer from the complete training
  // inputs, layer by layer: BN layer l sees its input computed with the
  // already-finalized statistics of layers before it.
  void finalize_bn_statistics(const Tensor<T>& inputs, std::size_t batch_size,
                              Exec exec = Exec::parallel);

  // Re-zero weights outside SC masks.
  void apply_masks();

 private:
  Tensor<T> run(const Tensor<T>& x, std::size_t end_layer, Phase phase, Exec exec,
                bool keep_activations);
  void build_layers();

  ModelSpec spec_;
  std::vector<Shape> shapes_;
  ParamStore<T> params_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  std::vector<Tensor<T>> activations_;
  Phase last_phase_ = Phase::train;
  bool bn_finalized_ = false;
};

// Copies values of identically named, identically shaped parameters.
template <typename T, typename U>
std::size_t transfer_params(const ParamStore<U>& from, ParamStore<T>& to);

template <typename T, typename U>
Model<T> convert_model(const Model<U>& m) {
  Model<T> out(m.spec());
  transfer_params(m.params(), out.params());
  out.set_bn_finalized(m.bn_finalized());
  return out;
}

// Layer records plus population-statistics status.
template <typename T>
nlohmann::json describe(const Model<T>& model);

extern template class Model<float>;
extern template class Model<double>;

}  // namespace nds::nn
