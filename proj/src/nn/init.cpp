#include "nds/nn/init.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nds/common/rng.hpp"

namespace nds::nn {

namespace {

template <typename T>
void init_layer(Model<T>& model, std::size_t layer, std::uint64_t seed) {
  const auto& spec = model.spec().layers[layer];
  for (std::size_t idx : model.layer_params(layer)) {
    auto& p = model.params()[idx];
    switch (p.role) {
      case ParamRole::bias:
      case ParamRole::bn_shift:
      case ParamRole::bn_mean: std::fill(p.value.begin(), p.value.end(), T{0}); continue;
      case ParamRole::bn_scale:
      case ParamRole::bn_var: std::fill(p.value.begin(), p.value.end(), T{1}); continue;
      case ParamRole::weight: break;
    }
    std::mt19937_64 gen(hash_keys({seed, hash_string(p.name)}));
    std::normal_distribution<double> normal(0.0, 1.0);
    if (const auto* sc = std::get_if<ScSpec>(&spec.kind)) {
      const auto& mask = *sc->mask;
      for (std::size_t r = 0; r < mask.rows(); ++r) {
        const auto fan_in = static_cast<double>(std::max<std::size_t>(mask.row_count(r), 1));
        const double sd = std::sqrt(2.0 / fan_in);
        for (std::size_t c = 0; c < mask.cols(); ++c) {
          const double z = normal(gen);
          p.value[r * mask.cols() + c] = mask(r, c) ? static_cast<T>(sd * z) : T{0};
        }
      }
      continue;
    }
    std::size_t fan_in = 1;
    if (const auto* fc = std::get_if<FcSpec>(&spec.kind)) fan_in = fc->in;
    if (const auto* conv = std::get_if<ConvSpec>(&spec.kind))
      fan_in = conv->filter_size * conv->in_channels;
    const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : p.value) v = static_cast<T>(sd * normal(gen));
  }
}

}  // namespace

template <typename T>
void init_params(Model<T>& model, std::uint64_t seed) {
  for (std::size_t l = 0; l < model.spec().layers.size(); ++l) init_layer(model, l, seed);
  model.set_bn_finalized(false);
}

template <typename T>
void init_layers(Model<T>& model, const std::vector<std::string>& layer_names, std::uint64_t seed) {
  for (const auto& name : layer_names) init_layer(model, model.spec().index_of(name), seed);
  if (model.has_batch_norm()) model.set_bn_finalized(false);
}

template void init_params(Model<float>&, std::uint64_t);
template void init_params(Model<double>&, std::uint64_t);
template void init_layers(Model<float>&, const std::vector<std::string>&, std::uint64_t);
template void init_layers(Model<double>&, const std::vector<std::string>&, std::uint64_t);

}  // namespace nds::nn
