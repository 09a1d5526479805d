#include "nds/train/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>

#include "nds/common/rng.hpp"

namespace nds::train {

void TrainConfig::validate() const {
  if (!(reg_weight >= 0.0)) throw InvalidArgument("reg_weight must be >= 0");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw InvalidArgument("beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw InvalidArgument("beta2 must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
}

template <typename T>
void adam_step(std::span<T> param, std::span<const T> grad, AdamMoments& st,
               const TrainConfig& cfg) {
  if (param.size() != grad.size()) throw ShapeError("adam_step: gradient size mismatch");
  if (st.m.size() != param.size()) {
    st.m.assign(param.size(), 0.0);
    st.v.assign(param.size(), 0.0);
    st.step = 0;
  }
  ++st.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    st.m[i] = cfg.beta1 * st.m[i] + (1.0 - cfg.beta1) * g;
    st.v[i] = cfg.beta2 * st.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = st.m[i] / c1;
    const double v_hat = st.v[i] / c2;
    param[i] = static_cast<T>(param[i] - cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon));
  }
}

template <typename T>
double penalty_value(const nn::Model<T>& model, double reg_weight) {
  if (reg_weight == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& p : model.params())
    if (p.penalized())
      for (T v : p.value) s += static_cast<double>(v) * static_cast<double>(v);
  return reg_weight * s;
}

template <typename T>
LossValue loss_eval(nn::Model<T>& model, const nn::Tensor<T>& x, const nn::Tensor<T>& y,
                    double reg_weight, nn::Phase phase, nn::Gradients<T>* grads,
                    bool deterministic, Exec exec) {
  if (x.batch == 0) throw InvalidArgument("loss_eval: empty batch");
  if (x.batch != y.batch) throw ShapeError("loss_eval: input and target batch sizes differ");
  const auto out = model.forward(x, phase, exec);
  if (out.data.size() != y.data.size()) throw ShapeError("loss_eval: target shape mismatch");
  const double inv_n = 1.0 / static_cast<double>(x.batch);
  const auto n = static_cast<std::int64_t>(out.data.size());
  double sse = 0.0;
  if (deterministic || exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(out.data[i]) - static_cast<double>(y.data[i]);
      sse += d * d;
    }
  } else {
#pragma omp parallel for reduction(+ : sse) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(out.data[i]) - static_cast<double>(y.data[i]);
      sse += d * d;
    }
  }
  LossValue lv{sse * inv_n, penalty_value(model, reg_weight)};
  if (!grads) return lv;
  nn::Tensor<T> d_out(out.batch, out.height, out.channels);
  for (std::int64_t i = 0; i < n; ++i)
    d_out.data[i] = static_cast<T>(2.0 * inv_n * (static_cast<double>(out.data[i]) - y.data[i]));
  model.backward(d_out, *grads, exec);
  if (reg_weight != 0.0)
    for (std::size_t p = 0; p < model.params().size(); ++p) {
      const auto& par = model.params()[p];
      if (!par.penalized()) continue;
      for (std::size_t i = 0; i < par.value.size(); ++i)
        (*grads)[p][i] += static_cast<T>(2.0 * reg_weight * par.value[i]);
    }
  return lv;
}

namespace {

template <typename T>
nn::Tensor<T> gather(const nn::Tensor<T>& src, std::span<const std::size_t> rows) {
  nn::Tensor<T> out(rows.size(), src.height, src.channels);
  const std::size_t row = src.sample_size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto s = src.sample(rows[r]);
    std::copy(s.begin(), s.end(), out.data.begin() + static_cast<std::ptrdiff_t>(r * row));
  }
  return out;
}

template <typename T>
nn::Tensor<T> slice(const nn::Tensor<T>& src, std::size_t start, std::size_t count) {
  nn::Tensor<T> out(count, src.height, src.channels);
  const std::size_t row = src.sample_size();
  std::copy_n(src.data.begin() + static_cast<std::ptrdiff_t>(start * row), count * row,
              out.data.begin());
  return out;
}

}  // namespace

template <typename T>
LossValue dataset_loss(nn::Model<T>& model, const nn::Tensor<T>& x, const nn::Tensor<T>& y,
                       double reg_weight, nn::Phase phase, std::size_t chunk, Exec exec) {
  if (x.batch == 0) throw InvalidArgument("dataset_loss: empty set");
  if (chunk == 0) throw InvalidArgument("dataset_loss: chunk must be positive");
  double sse = 0.0;
  for (std::size_t start = 0; start < x.batch; start += chunk) {
    const std::size_t n = std::min(chunk, x.batch - start);
    nn::Gradients<T>* no_grads = nullptr;
    const auto lv =
        loss_eval(model, slice(x, start, n), slice(y, start, n), 0.0, phase, no_grads, true, exec);
    sse += lv.data * static_cast<double>(n);
  }
  return {sse / static_cast<double>(x.batch), penalty_value(model, reg_weight)};
}

void write_history_csv(const std::filesystem::path& path, const History& history) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "epoch,train_loss,val_loss\n" << std::setprecision(17);
  for (const auto& r : history) {
    out << r.epoch << ',' << r.train_loss << ',';
    if (!std::isnan(r.val_loss)) out << r.val_loss;
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

template <typename T>
TrainData<T> make_train_data(const MatrixD& X, const MatrixD& Y) {
  if (X.rows() != Y.rows()) throw ShapeError("inputs and targets have different row counts");
  return {nn::tensor_from_rows<T>(X), nn::tensor_from_rows<T>(Y)};
}

template <typename T>
Trainer<T>::Trainer(nn::Model<T>& model, TrainConfig config)
    : model_(model), config_(std::move(config)) {
  config_.validate();
}

template <typename T>
History Trainer<T>::fit(const TrainData<T>& train, const TrainData<T>* val, std::size_t epochs,
                        const std::set<std::string>& frozen, Exec exec) {
  if (train.size() == 0) throw InvalidArgument("empty training set");
  for (const auto& name : frozen)
    if (!model_.params().contains(name)) throw InvalidArgument("unknown frozen parameter: " + name);
  std::vector<std::size_t> update;
  for (std::size_t p = 0; p < model_.params().size(); ++p) {
    const auto& par = model_.params()[p];
    if (par.trainable && !frozen.contains(par.name)) update.push_back(p);
  }

  History history;
  std::vector<std::size_t> order(train.size());
  nn::Gradients<T> grads = model_.zero_gradients();
  const std::size_t bs = config_.batch_size;
  for (std::size_t e = 0; e < epochs; ++e) {
    const std::size_t epoch = ++epochs_done_;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 gen(hash_keys({config_.seed, 0x5348u, epoch}));
    std::shuffle(order.begin(), order.end(), gen);

    double weighted = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += bs, ++batch_index) {
      const std::size_t n = std::min(bs, order.size() - start);
      const std::span<const std::size_t> rows(order.data() + start, n);
      const auto lv = loss_eval(model_, gather(train.x, rows), gather(train.y, rows),
                                config_.reg_weight, nn::Phase::train, &grads,
                                config_.deterministic, exec);
      if (!std::isfinite(lv.total())) throw NonFiniteLossError(epoch, batch_index);
      weighted += lv.total() * static_cast<double>(n);
      for (std::size_t p : update) {
        auto& par = model_.params()[p];
        adam_step<T>(par.value, grads[p], adam_[par.name], config_);
      }
      model_.apply_masks();
    }
    EpochRecord rec{epoch, weighted / static_cast<double>(train.size())};
    if (val && val->size() > 0)
      rec.val_loss = dataset_loss(model_, val->x, val->y, config_.reg_weight, nn::Phase::train, bs,
                                  exec)
                         .total();
    history.push_back(rec);
    if (callback_) callback_(rec, model_);
  }
  if (epochs > 0 && model_.has_batch_norm())
    model_.finalize_bn_statistics(train.x, std::max<std::size_t>(bs, 256), exec);
  return history;
}

template void adam_step<float>(std::span<float>, std::span<const float>, AdamMoments&,
                               const TrainConfig&);
template void adam_step<double>(std::span<double>, std::span<const double>, AdamMoments&,
                                const TrainConfig&);
template double penalty_value(const nn::Model<float>&, double);
template double penalty_value(const nn::Model<double>&, double);
template LossValue loss_eval(nn::Model<float>&, const nn::Tensor<float>&, const nn::Tensor<float>&,
                             double, nn::Phase, nn::Gradients<float>*, bool, Exec);
template LossValue loss_eval(nn::Model<double>&, const nn::Tensor<double>&,
                             const nn::Tensor<double>&, double, nn::Phase, nn::Gradients<double>*,
                             bool, Exec);
template LossValue dataset_loss(nn::Model<float>&, const nn::Tensor<float>&,
                                const nn::Tensor<float>&, double, nn::Phase, std::size_t, Exec);
template LossValue dataset_loss(nn::Model<double>&, const nn::Tensor<double>&,
                                const nn::Tensor<double>&, double, nn::Phase, std::size_t, Exec);
template TrainData<float> make_train_data(const MatrixD&, const MatrixD&);
template TrainData<double> make_train_data(const MatrixD&, const MatrixD&);
template class Trainer<float>;
template class Trainer<double>;

}  // namespace nds::train
