#include "nds/nn/model.hpp"

#include <algorithm>

#include "layers.hpp"

namespace nds::nn {

namespace {

template <typename T>
void add_param(ParamStore<T>& store, const std::string& layer_name, const char* suffix,
               std::vector<std::size_t> dims, ParamRole role, bool trainable, std::size_t layer,
               T fill) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  store.add(Param<T>{layer_name + "/" + suffix, std::move(dims), std::vector<T>(n, fill), role,
                     trainable, layer});
}

template <typename T>
ParamStore<T> create_params(const ModelSpec& spec, const std::vector<Shape>& shapes) {
  ParamStore<T> store;
  Shape in = spec.input;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const auto& layer = spec.layers[l];
    const auto& name = layer.name;
    if (const auto* fc = std::get_if<FcSpec>(&layer.kind)) {
      add_param<T>(store, name, "W", {fc->out, fc->in}, ParamRole::weight, true, l, T{0});
      add_param<T>(store, name, "b", {fc->out}, ParamRole::bias, true, l, T{0});
    } else if (const auto* sc = std::get_if<ScSpec>(&layer.kind)) {
      add_param<T>(store, name, "W", {sc->mask->rows(), sc->mask->cols()}, ParamRole::weight, true,
                   l, T{0});
      add_param<T>(store, name, "b", {sc->mask->rows()}, ParamRole::bias, true, l, T{0});
    } else if (const auto* conv = std::get_if<ConvSpec>(&layer.kind)) {
      add_param<T>(store, name, "W", {conv->out_channels, conv->filter_size, conv->in_channels},
                   ParamRole::weight, true, l, T{0});
      add_param<T>(store, name, "b", {conv->out_channels}, ParamRole::bias, true, l, T{0});
    } else {
      const auto& bn = std::get<BnSpec>(layer.kind);
      std::vector<std::size_t> dims = bn.mode == BnParamMode::per_height
                                          ? std::vector<std::size_t>{in.height}
                                          : std::vector<std::size_t>{in.height, in.channels};
      add_param<T>(store, name, "gamma", dims, ParamRole::bn_scale, true, l, T{1});
      add_param<T>(store, name, "beta", dims, ParamRole::bn_shift, true, l, T{0});
      add_param<T>(store, name, "mean", dims, ParamRole::bn_mean, false, l, T{0});
      add_param<T>(store, name, "var", dims, ParamRole::bn_var, false, l, T{1});
    }
    in = shapes[l];
  }
  return store;
}

}  // namespace

template <typename T>
Model<T>::Model(ModelSpec spec) : spec_(std::move(spec)) {
  shapes_ = spec_.infer_shapes();
  std::vector<std::string> names;
  for (const auto& l : spec_.layers) {
    if (l.name.empty() || l.name.find('/') != std::string::npos)
      throw InvalidArgument("invalid layer name: '" + l.name + "'");
    if (std::find(names.begin(), names.end(), l.name) != names.end())
      throw InvalidArgument("duplicate layer name: " + l.name);
    names.push_back(l.name);
  }
  params_ = create_params<T>(spec_, shapes_);
  build_layers();
}

template <typename T>
Model<T>::Model(const Model& other)
    : spec_(other.spec_), shapes_(other.shapes_), params_(other.params_),
      bn_finalized_(other.bn_finalized_) {
  build_layers();
}

template <typename T>
Model<T>& Model<T>::operator=(const Model& other) {
  if (this != &other) {
    Model tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

template <typename T>
Model<T>::Model(Model&&) noexcept = default;
template <typename T>
Model<T>& Model<T>::operator=(Model&&) noexcept = default;
template <typename T>
Model<T>::~Model() = default;

template <typename T>
void Model<T>::build_layers() {
  layers_.clear();
  activations_.clear();
  Shape in = spec_.input;
  for (std::size_t l = 0; l < spec_.layers.size(); ++l) {
    layers_.push_back(make_layer<T>(spec_.layers[l], in, shapes_[l], params_));
    in = shapes_[l];
  }
}

template <typename T>
std::vector<std::size_t> Model<T>::layer_params(std::size_t layer) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].layer == layer) out.push_back(i);
  return out;
}

template <typename T>
std::vector<std::size_t> Model<T>::layer_params(const std::string& layer_name) const {
  return layer_params(spec_.index_of(layer_name));
}

template <typename T>
bool Model<T>::has_batch_norm() const noexcept {
  return std::any_of(spec_.layers.begin(), spec_.layers.end(),
                     [](const LayerSpec& l) { return std::holds_alternative<BnSpec>(l.kind); });
}

template <typename T>
Tensor<T> Model<T>::run(const Tensor<T>& x, std::size_t end_layer, Phase phase, Exec exec,
                        bool keep_activations) {
  if (x.height != spec_.input.height || x.channels != spec_.input.channels)
    throw ShapeError("input shape " + std::to_string(x.height) + "x" + std::to_string(x.channels) +
                     " does not match model input " + std::to_string(spec_.input.height) + "x" +
                     std::to_string(spec_.input.channels));
  activations_.clear();
  if (keep_activations) activations_.push_back(x);
  Tensor<T> cur = x;
  for (std::size_t l = 0; l < end_layer; ++l) {
    Tensor<T> next;
    layers_[l]->forward(params_, cur, next, phase, exec);
    if (keep_activations) activations_.push_back(next);
    cur = std::move(next);
  }
  last_phase_ = phase;
  return cur;
}

template <typename T>
Tensor<T> Model<T>::forward(const Tensor<T>& x, Phase phase, Exec exec) {
  if (phase == Phase::eval && has_batch_norm() && !bn_finalized_)
    throw Error("eval phase requires finalized BN population statistics");
  return run(x, layers_.size(), phase, exec, true);
}

template <typename T>
Gradients<T> Model<T>::zero_gradients() const {
  Gradients<T> g(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) g[i].assign(params_[i].value.size(), T{0});
  return g;
}

template <typename T>
Tensor<T> Model<T>::backward(const Tensor<T>& d_output, Gradients<T>& grads, Exec exec) {
  if (activations_.size() != layers_.size() + 1)
    throw Error("backward requires a preceding forward pass");
  const auto& out = activations_.back();
  if (d_output.batch != out.batch || d_output.height != out.height ||
      d_output.channels != out.channels)
    throw ShapeError("output gradient shape does not match the last forward pass");
  if (grads.size() != params_.size()) grads = zero_gradients();
  for (std::size_t i = 0; i < params_.size(); ++i) grads[i].resize(params_[i].value.size());
  Tensor<T> dy = d_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    Tensor<T> dx;
    layers_[l]->backward(params_, activations_[l], activations_[l + 1], dy, &dx, grads,
                         last_phase_, exec);
    dy = std::move(dx);
  }
  return dy;
}

template <typename T>
void Model<T>::finalize_bn_statistics(const Tensor<T>& inputs, std::size_t batch_size, Exec exec) {
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");
  if (inputs.batch == 0) throw InvalidArgument("no inputs for BN statistics");
  const std::size_t row = inputs.sample_size();
  for (std::size_t l = 0; l < spec_.layers.size(); ++l) {
    const auto* bn = std::get_if<BnSpec>(&spec_.layers[l].kind);
    if (!bn) continue;
    const Shape in = l == 0 ? spec_.input : shapes_[l - 1];
    BnGroups groups{bn->mode == BnParamMode::per_height, in.height, in.channels};
    BnMoments moments(groups.count());
    for (std::size_t start = 0; start < inputs.batch; start += batch_size) {
      const std::size_t n = std::min(batch_size, inputs.batch - start);
      Tensor<T> chunk(n, inputs.height, inputs.channels);
      std::copy_n(inputs.data.begin() + static_cast<std::ptrdiff_t>(start * row), n * row,
                  chunk.data.begin());
      moments.add(run(chunk, l, Phase::eval, exec, false), groups);
    }
    const auto var = moments.variance();
    auto& mean_p = params_.at(spec_.layers[l].name + "/mean").value;
    auto& var_p = params_.at(spec_.layers[l].name + "/var").value;
    for (std::size_t g = 0; g < groups.count(); ++g) {
      mean_p[g] = static_cast<T>(moments.mean[g]);
      var_p[g] = static_cast<T>(var[g]);
    }
  }
  activations_.clear();
  bn_finalized_ = true;
}

template <typename T>
void Model<T>::apply_masks() {
  for (const auto& l : layers_) l->mask_weights(params_);
}

template <typename T, typename U>
std::size_t transfer_params(const ParamStore<U>& from, ParamStore<T>& to) {
  std::size_t n = 0;
  for (auto& p : to) {
    if (!from.contains(p.name)) continue;
    const auto& src = from.at(p.name);
    if (src.dims != p.dims) continue;
    std::transform(src.value.begin(), src.value.end(), p.value.begin(),
                   [](U v) { return static_cast<T>(v); });
    ++n;
  }
  return n;
}

template <typename T>
nlohmann::json describe(const Model<T>& model) {
  auto j = to_json(model.spec());
  for (auto& rec : j)
    if (rec.at("type") == "bn") rec["population_stats"] = model.bn_finalized() ? "finalized" : "pending";
  return j;
}

template class Model<float>;
template class Model<double>;

template std::size_t transfer_params(const ParamStore<float>&, ParamStore<float>&);
template std::size_t transfer_params(const ParamStore<double>&, ParamStore<float>&);
template std::size_t transfer_params(const ParamStore<float>&, ParamStore<double>&);
template std::size_t transfer_params(const ParamStore<double>&, ParamStore<double>&);

template nlohmann::json describe(const Model<float>&);
template nlohmann::json describe(const Model<double>&);

}  // namespace nds::nn
