#pragma once

#include <memory>
#include <optional>

#include "nds/nn/kernels.hpp"
#include "nds/nn/model.hpp"

namespace nds::nn {

// Runtime form of a LayerSpec. Parameters live in the model's ParamStore and
// are addressed by index, so layers survive copies and moves of the model.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual void forward(const ParamStore<T>& params, const Tensor<T>& x, Tensor<T>& y, Phase phase,
                       Exec exec) = 0;
  // dy may be modified in place. dx is skipped when null.
  virtual void backward(const ParamStore<T>& params, const Tensor<T>& x, const Tensor<T>& y,
                        Tensor<T>& dy, Tensor<T>* dx, Gradients<T>& grads, Phase phase,
                        Exec exec) = 0;
  virtual void mask_weights(ParamStore<T>&) const {}
};

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& in, const Shape& out,
                                     const ParamStore<T>& params);

// Group layout of a BN layer: group of element (h, c) and the number of groups.
struct BnGroups {
  bool per_height = true;
  std::size_t height = 0;
  std::size_t channels = 0;
  std::size_t count() const { return per_height ? height : height * channels; }
  std::size_t of(std::size_t h, std::size_t c) const { return per_height ? h : h * channels + c; }
};

// Exact per-group mean and biased variance, accumulated chunk by chunk.
struct BnMoments {
  std::vector<double> mean;
  std::vector<double> m2;
  std::vector<double> n;

  explicit BnMoments(std::size_t groups) : mean(groups, 0.0), m2(groups, 0.0), n(groups, 0.0) {}
  template <typename T>
  void add(const Tensor<T>& x, const BnGroups& g);
  std::vector<double> variance() const;
};

}  // namespace nds::nn
