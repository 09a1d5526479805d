#include "layers.hpp"

#include <cmath>

namespace nds::nn {

namespace {

template <typename T>
void apply_activation(Activation a, Tensor<T>& y, Exec exec) {
  if (a == Activation::relu) kernels::relu_forward<T>(y.data, exec);
}

template <typename T>
void activation_backward(Activation a, const Tensor<T>& y, Tensor<T>& dy, Exec exec) {
  if (a == Activation::relu) kernels::relu_backward<T>(y.data, dy.data, exec);
}

template <typename T>
class DenseLayer final : public Layer<T> {
 public:
  DenseLayer(std::size_t in, std::size_t out, Activation act, std::size_t w, std::size_t b,
             std::shared_ptr<const BitMask> mask)
      : in_(in), out_(out), act_(act), w_(w), b_(b), mask_(std::move(mask)) {}

  void forward(const ParamStore<T>& p, const Tensor<T>& x, Tensor<T>& y, Phase,
               Exec exec) override {
    y = Tensor<T>(x.batch, out_, 1);
    kernels::dense_forward<T>(x.data, weights(p), p[b_].value, y.data, x.batch, in_, out_, exec);
    apply_activation(act_, y, exec);
  }

  void backward(const ParamStore<T>& p, const Tensor<T>& x, const Tensor<T>& y, Tensor<T>& dy,
                Tensor<T>* dx, Gradients<T>& g, Phase, Exec exec) override {
    activation_backward(act_, y, dy, exec);
    std::span<T> dxs;
    if (dx) {
      *dx = Tensor<T>(x.batch, x.height, x.channels);
      dxs = dx->data;
    }
    kernels::dense_backward<T>(x.data, weights(p), dy.data, g[w_], g[b_], dxs, x.batch, in_, out_,
                               exec);
    if (mask_)
      for (std::size_t i = 0; i < g[w_].size(); ++i)
        if (!(*mask_)(i / in_, i % in_)) g[w_][i] = T{0};
  }

  void mask_weights(ParamStore<T>& p) const override {
    if (!mask_) return;
    auto& w = p[w_].value;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!(*mask_)(i / in_, i % in_)) w[i] = T{0};
  }

 private:
  // Effective weights mask (.) W; masked entries never reach the output.
  std::span<const T> weights(const ParamStore<T>& p) {
    const auto& w = p[w_].value;
    if (!mask_) return w;
    masked_.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) masked_[i] = (*mask_)(i / in_, i % in_) ? w[i] : T{0};
    return masked_;
  }

  std::size_t in_, out_;
  Activation act_;
  std::size_t w_, b_;
  std::shared_ptr<const BitMask> mask_;
  std::vector<T> masked_;
};

template <typename T>
class ConvLayer final : public Layer<T> {
 public:
  ConvLayer(const ConvSpec& c, std::size_t height, std::size_t w, std::size_t b)
      : spec_(c), height_(height), w_(w), b_(b) {}

  void forward(const ParamStore<T>& p, const Tensor<T>& x, Tensor<T>& y, Phase,
               Exec exec) override {
    y = Tensor<T>(x.batch, height_, spec_.out_channels);
    kernels::conv1d_forward<T>(x.data, p[w_].value, p[b_].value, y.data, shape(x.batch), exec);
    apply_activation(spec_.activation, y, exec);
  }

  void backward(const ParamStore<T>& p, const Tensor<T>& x, const Tensor<T>& y, Tensor<T>& dy,
                Tensor<T>* dx, Gradients<T>& g, Phase, Exec exec) override {
    activation_backward(spec_.activation, y, dy, exec);
    std::span<T> dxs;
    if (dx) {
      *dx = Tensor<T>(x.batch, x.height, x.channels);
      dxs = dx->data;
    }
    kernels::conv1d_backward<T>(x.data, p[w_].value, dy.data, g[w_], g[b_], dxs, shape(x.batch),
                                exec);
  }

 private:
  kernels::ConvShape shape(std::size_t batch) const {
    return {batch,        height_, spec_.in_channels, spec_.out_channels, spec_.filter_size,
            conv_pad_before(spec_)};
  }

  ConvSpec spec_;
  std::size_t height_;
  std::size_t w_, b_;
};

template <typename T>
class BnLayer final : public Layer<T> {
 public:
  BnLayer(const BnSpec& s, const Shape& in, std::size_t gamma, std::size_t beta, std::size_t mean,
          std::size_t var)
      : eps_(s.eps),
        groups_{s.mode == BnParamMode::per_height, in.height, in.channels},
        gamma_(gamma), beta_(beta), mean_(mean), var_(var) {}

  void forward(const ParamStore<T>& p, const Tensor<T>& x, Tensor<T>& y, Phase phase,
               Exec exec) override {
    const std::size_t G = groups_.count();
    std::vector<double> mean(G), inv_std(G);
    if (phase == Phase::train) {
      BnMoments m(G);
      m.add(x, groups_);
      const auto var = m.variance();
      for (std::size_t g = 0; g < G; ++g) {
        mean[g] = m.mean[g];
        inv_std[g] = 1.0 / std::sqrt(var[g] + eps_);
      }
    } else {
      for (std::size_t g = 0; g < G; ++g) {
        mean[g] = static_cast<double>(p[mean_].value[g]);
        inv_std[g] = 1.0 / std::sqrt(static_cast<double>(p[var_].value[g]) + eps_);
      }
    }
    const auto& gamma = p[gamma_].value;
    const auto& beta = p[beta_].value;
    y = Tensor<T>(x.batch, x.height, x.channels);
    xhat_ = Tensor<T>(x.batch, x.height, x.channels);
    const auto n = static_cast<std::int64_t>(x.batch);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::int64_t s = 0; s < n; ++s)
      for (std::size_t h = 0; h < x.height; ++h)
        for (std::size_t c = 0; c < x.channels; ++c) {
          const std::size_t g = groups_.of(h, c);
          const T xh = static_cast<T>((x.at(s, h, c) - mean[g]) * inv_std[g]);
          xhat_.at(s, h, c) = xh;
          y.at(s, h, c) = gamma[g] * xh + beta[g];
        }
    inv_std_ = std::move(inv_std);
  }

  void backward(const ParamStore<T>& p, const Tensor<T>& x, const Tensor<T>&, Tensor<T>& dy,
                Tensor<T>* dx, Gradients<T>& grads, Phase phase, Exec) override {
    const std::size_t G = groups_.count();
    const auto& gamma = p[gamma_].value;
    // Group sums in double, accumulated in sample order.
    std::vector<double> sum_dy(G, 0.0), sum_dy_xh(G, 0.0), cnt(G, 0.0);
    for (std::size_t s = 0; s < x.batch; ++s)
      for (std::size_t h = 0; h < x.height; ++h)
        for (std::size_t c = 0; c < x.channels; ++c) {
          const std::size_t g = groups_.of(h, c);
          sum_dy[g] += dy.at(s, h, c);
          sum_dy_xh[g] += static_cast<double>(dy.at(s, h, c)) * xhat_.at(s, h, c);
          cnt[g] += 1.0;
        }
    for (std::size_t g = 0; g < G; ++g) {
      grads[gamma_][g] = static_cast<T>(sum_dy_xh[g]);
      grads[beta_][g] = static_cast<T>(sum_dy[g]);
    }
    std::fill(grads[mean_].begin(), grads[mean_].end(), T{0});
    std::fill(grads[var_].begin(), grads[var_].end(), T{0});
    if (!dx) return;
    *dx = Tensor<T>(x.batch, x.height, x.channels);
    for (std::size_t s = 0; s < x.batch; ++s)
      for (std::size_t h = 0; h < x.height; ++h)
        for (std::size_t c = 0; c < x.channels; ++c) {
          const std::size_t g = groups_.of(h, c);
          const double scale = static_cast<double>(gamma[g]) * inv_std_[g];
          double v = dy.at(s, h, c);
          if (phase == Phase::train)
            v -= (sum_dy[g] + xhat_.at(s, h, c) * sum_dy_xh[g]) / cnt[g];
          dx->at(s, h, c) = static_cast<T>(scale * v);
        }
  }

 private:
  double eps_;
  BnGroups groups_;
  std::size_t gamma_, beta_, mean_, var_;
  Tensor<T> xhat_;
  std::vector<double> inv_std_;
};

}  // namespace

template <typename T>
void BnMoments::add(const Tensor<T>& x, const BnGroups& g) {
  const std::size_t G = g.count();
  std::vector<double> sum(G, 0.0), cnt(G, 0.0);
  for (std::size_t s = 0; s < x.batch; ++s)
    for (std::size_t h = 0; h < x.height; ++h)
      for (std::size_t c = 0; c < x.channels; ++c) {
        sum[g.of(h, c)] += x.at(s, h, c);
        cnt[g.of(h, c)] += 1.0;
      }
  std::vector<double> cm(G), cm2(G, 0.0);
  for (std::size_t k = 0; k < G; ++k) cm[k] = cnt[k] > 0 ? sum[k] / cnt[k] : 0.0;
  for (std::size_t s = 0; s < x.batch; ++s)
    for (std::size_t h = 0; h < x.height; ++h)
      for (std::size_t c = 0; c < x.channels; ++c) {
        const double d = x.at(s, h, c) - cm[g.of(h, c)];
        cm2[g.of(h, c)] += d * d;
      }
  // Chan et al. pairwise merge.
  for (std::size_t k = 0; k < G; ++k) {
    if (cnt[k] == 0) continue;
    const double tot = n[k] + cnt[k];
    const double delta = cm[k] - mean[k];
    mean[k] += delta * cnt[k] / tot;
    m2[k] += cm2[k] + delta * delta * n[k] * cnt[k] / tot;
    n[k] = tot;
  }
}

std::vector<double> BnMoments::variance() const {
  std::vector<double> v(m2.size(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = n[k] > 0 ? m2[k] / n[k] : 0.0;
  return v;
}

template void BnMoments::add<float>(const Tensor<float>&, const BnGroups&);
template void BnMoments::add<double>(const Tensor<double>&, const BnGroups&);

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& in, const Shape& out,
                                     const ParamStore<T>& params) {
  const auto idx = [&](const char* suffix) { return params.index(spec.name + "/" + suffix); };
  if (const auto* fc = std::get_if<FcSpec>(&spec.kind))
    return std::make_unique<DenseLayer<T>>(fc->in, fc->out, fc->activation, idx("W"), idx("b"),
                                           nullptr);
  if (const auto* sc = std::get_if<ScSpec>(&spec.kind))
    return std::make_unique<DenseLayer<T>>(sc->mask->cols(), sc->mask->rows(), sc->activation,
                                           idx("W"), idx("b"), sc->mask);
  if (const auto* conv = std::get_if<ConvSpec>(&spec.kind))
    return std::make_unique<ConvLayer<T>>(*conv, out.height, idx("W"), idx("b"));
  const auto& bn = std::get<BnSpec>(spec.kind);
  return std::make_unique<BnLayer<T>>(bn, in, idx("gamma"), idx("beta"), idx("mean"), idx("var"));
}

template std::unique_ptr<Layer<float>> make_layer(const LayerSpec&, const Shape&, const Shape&,
                                                  const ParamStore<float>&);
template std::unique_ptr<Layer<double>> make_layer(const LayerSpec&, const Shape&, const Shape&,
                                                   const ParamStore<double>&);

}  // namespace nds::nn
