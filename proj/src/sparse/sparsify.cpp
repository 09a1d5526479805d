#include "nds/sparse/sparsify.hpp"

#include <algorithm>
#include <cmath>

#include "nds/common/binary_io.hpp"
#include "nds/nn/init.hpp"

namespace nds::sparse {

std::string to_string(PatternKind k) {
  switch (k) {
    case PatternKind::lower_triangular: return "lower_triangular";
    case PatternKind::banded_lower: return "banded_lower";
    case PatternKind::none: return "none";
  }
  return "none";
}

nlohmann::json SparsityReport::to_json() const {
  const auto fit = fit_pattern(*this);
  return {{"threshold", threshold},
          {"ratio", ratio},
          {"max_abs", max_abs},
          {"nnz", nnz},
          {"lower_fraction", lower_fraction},
          {"max_lower_offset", max_lower_offset},
          {"band_width", band_width},
          {"rows", rows},
          {"cols", cols},
          {"pattern", to_string(fit.kind)},
          {"pattern_band_width", fit.band_width},
          {"histogram", histogram}};
}

std::pair<nn::BitMask, SparsityReport> sparsity_mask(const MatrixD& W, double ratio) {
  if (W.empty()) throw InvalidArgument("sparsity_mask: empty weight matrix");
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw InvalidArgument("sparsity_mask: ratio must lie in [0, 1]");
  SparsityReport rep;
  rep.ratio = ratio;
  rep.rows = W.rows();
  rep.cols = W.cols();
  for (double v : W.storage()) {
    if (!std::isfinite(v)) throw InvalidArgument("sparsity_mask: non-finite weight");
    rep.max_abs = std::max(rep.max_abs, std::abs(v));
  }
  if (rep.max_abs == 0.0) throw InvalidArgument("sparsity_mask: all weights are zero");
  rep.threshold = ratio * rep.max_abs;
  rep.histogram.assign(W.rows() + W.cols() - 1, 0);
  nn::BitMask mask(W.rows(), W.cols());
  std::vector<std::size_t> offsets;
  std::size_t lower = 0;
  for (std::size_t i = 0; i < W.rows(); ++i)
    for (std::size_t j = 0; j < W.cols(); ++j) {
      if (!(std::abs(W(i, j)) >= rep.threshold)) continue;
      mask.set(i, j, true);
      ++rep.nnz;
      ++rep.histogram[i + W.cols() - 1 - j];
      if (i >= j) {
        ++lower;
        offsets.push_back(i - j);
        rep.max_lower_offset = std::max(rep.max_lower_offset, i - j);
      }
    }
  rep.lower_fraction = static_cast<double>(lower) / static_cast<double>(rep.nnz);
  if (!offsets.empty()) {
    std::sort(offsets.begin(), offsets.end());
    const auto k = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(offsets.size()))) - 1;
    rep.band_width = offsets[std::min(k, offsets.size() - 1)];
  }
  return {std::move(mask), rep};
}

nn::BitMask structured_mask(PatternKind kind, std::size_t n, std::size_t band_width) {
  if (n == 0) throw InvalidArgument("structured_mask: n must be positive");
  if (kind == PatternKind::none) throw InvalidArgument("structured_mask: no pattern to build");
  if (kind == PatternKind::banded_lower && band_width >= n)
    throw InvalidArgument("structured_mask: band width must be below n");
  const std::size_t w = kind == PatternKind::lower_triangular ? n - 1 : band_width;
  nn::BitMask m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i >= w ? i - w : 0; j <= i; ++j) m.set(i, j, true);
  return m;
}

FittedPattern fit_pattern(const SparsityReport& r) {
  const auto n = static_cast<double>(std::max(r.rows, r.cols));
  if (r.lower_fraction >= 0.99 && static_cast<double>(r.max_lower_offset) >= 0.9 * n)
    return {PatternKind::lower_triangular, r.rows - 1};
  if (r.lower_fraction >= 0.95) return {PatternKind::banded_lower, r.band_width};
  return {PatternKind::none, 0};
}

MatrixD weight_matrix(const nn::ParamStore<double>& params, const std::string& layer) {
  const auto& w = params.at(layer + "/W");
  if (w.dims.size() != 2) throw ShapeError(layer + "/W is not a matrix");
  return MatrixD(w.dims[0], w.dims[1], w.value);
}

void write_mask(const std::filesystem::path& path, const nn::BitMask& mask) {
  binary::Writer w(path);
  w.magic("NMK1");
  w.put<std::uint64_t>(mask.rows());
  w.put<std::uint64_t>(mask.cols());
  const auto bytes = mask.pack();
  w.bytes(bytes);
  w.finish();
}

nn::BitMask read_mask(const std::filesystem::path& path) {
  binary::Reader r(path);
  r.expect_magic("NMK1");
  const auto rows = r.get<std::uint64_t>();
  const auto cols = r.get<std::uint64_t>();
  if (rows != 0 && cols > (std::uint64_t{1} << 40) / rows) throw FormatError("mask dimensions too large");
  auto bytes = r.get_bytes((rows * cols + 7) / 8);
  if (!r.at_end()) throw FormatError("mask file has trailing bytes");
  return nn::BitMask::unpack(rows, cols, bytes);
}

ScTransfer build_sc_from_fc(const nn::ParamStore<double>& params, const std::string& layer,
                            std::shared_ptr<const nn::BitMask> mask) {
  if (!mask) throw InvalidArgument("build_sc_from_fc: no mask");
  const auto W = weight_matrix(params, layer);
  if (W.rows() != mask->rows() || W.cols() != mask->cols())
    throw ShapeError("build_sc_from_fc: mask shape does not match " + layer + "/W");
  const auto& b = params.at(layer + "/b").value;
  ScTransfer t{mask, W.storage(), b};
  for (std::size_t i = 0; i < W.rows(); ++i)
    for (std::size_t j = 0; j < W.cols(); ++j)
      if (!(*mask)(i, j)) t.weights[i * W.cols() + j] = 0.0;
  return t;
}

namespace {

void append_conv_stack(nn::ModelSpec& spec, std::size_t n_l, const TemplateOptions& opt) {
  using nn::Activation;
  using nn::BnSpec;
  using nn::ConvSpec;
  spec.layers.push_back({"conv1", ConvSpec{2, 1, 1, opt.n_c, Activation::relu}});
  for (std::size_t l = 1; l < n_l; ++l) {
    spec.layers.push_back({"bn" + std::to_string(l), BnSpec{opt.bn_mode, opt.bn_eps}});
    spec.layers.push_back(
        {"conv" + std::to_string(l + 1), ConvSpec{2, 1, opt.n_c, opt.n_c, Activation::relu}});
  }
  spec.layers.push_back({"bn" + std::to_string(n_l), BnSpec{opt.bn_mode, opt.bn_eps}});
  spec.layers.push_back({"conv_out", ConvSpec{1, 1, opt.n_c, 1, Activation::linear}});
}

}  // namespace

nn::ModelSpec build_sparse_template(std::size_t n, std::size_t n_l,
                                    std::shared_ptr<const nn::BitMask> mask,
                                    const TemplateOptions& opt) {
  if (n_l == 0) throw InvalidArgument("sparse template needs n_l >= 1");
  if (opt.n_c == 0) throw InvalidArgument("n_c must be >= 1");
  if (!mask || mask->rows() != n || mask->cols() != n)
    throw ShapeError("sparse template mask must be n x n");
  nn::ModelSpec spec{{n, 1}, {}};
  append_conv_stack(spec, n_l, opt);
  spec.layers.push_back({"sc", nn::ScSpec{std::move(mask), nn::Activation::linear}});
  (void)spec.infer_shapes();
  return spec;
}

nn::ModelSpec build_conv_dense_template(std::size_t n, std::size_t n_l,
                                        std::size_t n_fc_remaining, const TemplateOptions& opt) {
  if (n_fc_remaining == 0) throw InvalidArgument("n_fc_remaining must be >= 1");
  if (n_l == 0) return build_dense_model(n, n_fc_remaining + 1);
  if (opt.n_c == 0) throw InvalidArgument("n_c must be >= 1");
  nn::ModelSpec spec{{n, 1}, {}};
  append_conv_stack(spec, n_l, opt);
  for (std::size_t k = 0; k < n_fc_remaining; ++k) {
    const bool last = k + 1 == n_fc_remaining;
    spec.layers.push_back({"fc" + std::to_string(k + 2),
                           nn::FcSpec{n, n, last ? nn::Activation::linear : nn::Activation::relu}});
  }
  (void)spec.infer_shapes();
  return spec;
}

nn::ModelSpec build_dense_model(std::size_t n, std::size_t n_fc) {
  if (n == 0 || n_fc == 0) throw InvalidArgument("dense model needs n >= 1 and n_fc >= 1");
  nn::ModelSpec spec{{n, 1}, {}};
  for (std::size_t k = 0; k < n_fc; ++k) {
    const bool last = k + 1 == n_fc;
    spec.layers.push_back({"fc" + std::to_string(k + 1),
                           nn::FcSpec{n, n, last ? nn::Activation::linear : nn::Activation::relu}});
  }
  return spec;
}

template <typename T>
nn::Model<T> make_sparse_model(const nn::ModelSpec& spec, const ScTransfer& sc, std::uint64_t seed) {
  nn::Model<T> model(spec);
  nn::init_params(model, seed);
  auto& W = model.params().at("sc/W");
  auto& b = model.params().at("sc/b");
  if (W.value.size() != sc.weights.size() || b.value.size() != sc.biases.size())
    throw ShapeError("transferred SC parameters do not fit the template");
  std::transform(sc.weights.begin(), sc.weights.end(), W.value.begin(),
                 [](double v) { return static_cast<T>(v); });
  std::transform(sc.biases.begin(), sc.biases.end(), b.value.begin(),
                 [](double v) { return static_cast<T>(v); });
  model.apply_masks();
  return model;
}

GrowthPlan default_growth_plan(std::size_t target_n_l, std::size_t epochs, std::size_t n_c) {
  return {target_n_l, n_c, epochs / 2, epochs - epochs / 2};
}

std::size_t count_bn_layers(const nn::ModelSpec& spec) {
  return static_cast<std::size_t>(std::count_if(spec.layers.begin(), spec.layers.end(), [](const auto& l) {
    return std::holds_alternative<nn::BnSpec>(l.kind);
  }));
}

template <typename T>
Grown<T> insert_bn_conv(const nn::Model<T>& model, std::uint64_t seed) {
  const auto& spec = model.spec();
  const auto shapes = spec.infer_shapes();
  std::size_t pos = spec.layers.size();
  for (std::size_t l = 0; l < spec.layers.size(); ++l)
    if (std::holds_alternative<nn::BnSpec>(spec.layers[l].kind)) {
      pos = l;
      break;
    }
  if (pos == spec.layers.size()) throw InvalidArgument("insert_bn_conv: model has no BN layer");
  const auto& bn = std::get<nn::BnSpec>(spec.layers[pos].kind);
  const std::size_t n_c = shapes[pos].channels;

  std::size_t k = 1;
  auto taken = [&](const std::string& name) {
    return std::any_of(spec.layers.begin(), spec.layers.end(),
                       [&](const auto& l) { return l.name == name; });
  };
  while (taken("conv_g" + std::to_string(k)) || taken("bn_g" + std::to_string(k))) ++k;
  const std::string conv_name = "conv_g" + std::to_string(k);
  const std::string bn_name = "bn_g" + std::to_string(k);

  nn::ModelSpec grown = spec;
  const auto at = grown.layers.begin() + static_cast<std::ptrdiff_t>(pos + 1);
  grown.layers.insert(at, {{conv_name, nn::ConvSpec{2, 1, n_c, n_c, nn::Activation::relu}},
                           {bn_name, bn}});
  Grown<T> out{nn::Model<T>(grown), {conv_name, bn_name}};
  nn::init_params(out.model, seed);
  nn::transfer_params(model.params(), out.model.params());
  out.model.set_bn_finalized(false);
  return out;
}

template <typename T>
train::History two_phase_train(nn::Model<T>& model, const std::vector<std::string>& new_layers,
                               const train::TrainData<T>& train_set,
                               const std::type_identity_t<train::TrainData<T>>* val_set,
                               const train::TrainConfig& config, std::size_t phase1_epochs,
                               std::size_t phase2_epochs, Exec exec) {
  if (new_layers.empty()) throw InvalidArgument("two_phase_train: no new layers given");
  std::set<std::size_t> fresh;
  for (const auto& name : new_layers) {
    const auto idx = model.layer_params(name);
    fresh.insert(idx.begin(), idx.end());
  }
  std::set<std::string> old = config.frozen_params;
  for (std::size_t p = 0; p < model.params().size(); ++p)
    if (!fresh.contains(p)) old.insert(model.params()[p].name);

  train::Trainer<T> trainer(model, config);
  auto history = trainer.fit(train_set, val_set, phase1_epochs, old, exec);
  auto rest = trainer.fit(train_set, val_set, phase2_epochs, config.frozen_params, exec);
  history.insert(history.end(), rest.begin(), rest.end());
  return history;
}

template nn::Model<float> make_sparse_model(const nn::ModelSpec&, const ScTransfer&, std::uint64_t);
template nn::Model<double> make_sparse_model(const nn::ModelSpec&, const ScTransfer&, std::uint64_t);
template Grown<float> insert_bn_conv(const nn::Model<float>&, std::uint64_t);
template Grown<double> insert_bn_conv(const nn::Model<double>&, std::uint64_t);
template train::History two_phase_train(nn::Model<float>&, const std::vector<std::string>&,
                                        const train::TrainData<float>&,
                                        const train::TrainData<float>*, const train::TrainConfig&,
                                        std::size_t, std::size_t, Exec);
template train::History two_phase_train(nn::Model<double>&, const std::vector<std::string>&,
                                        const train::TrainData<double>&,
                                        const train::TrainData<double>*,
                                        const train::TrainConfig&, std::size_t, std::size_t, Exec);

}  // namespace nds::sparse
