#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "nds/common/error.hpp"
#include "nds/common/matrix.hpp"
#include "nds/nn/model.hpp"

namespace nds::train {

struct TrainConfig {
  double reg_weight = 1e-4;     // lambda
  double learning_rate = 1e-3;  // alpha
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 1024;
  std::size_t epochs = 300;
  std::uint64_t seed = 0;
  std::set<std::string> frozen_params;
  // Fixed-order loss reduction. Kernels are deterministic either way.
  bool deterministic = false;

  void validate() const;
};

class NonFiniteLossError : public Error {
 public:
  NonFiniteLossError(std::size_t epoch, std::size_t batch)
      : Error("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
              std::to_string(batch)),
        epoch_(epoch), batch_(batch) {}
  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t batch() const noexcept { return batch_; }

 private:
  std::size_t epoch_, batch_;
};

// Moments of one parameter array.
struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
};

// Keyed by parameter name; arrays get fresh moments the first time they are updated.
using AdamState = std::unordered_map<std::string, AdamMoments>;

template <typename T>
void adam_step(std::span<T> param, std::span<const T> grad, AdamMoments& state,
               const TrainConfig& config);

struct LossValue {
  double data = 0.0;     // (1/N) sum |f(x_i) - y_i|^2
  double penalty = 0.0;  // lambda (|W|^2 + |b|^2)
  double total() const noexcept { return data + penalty; }
};

template <typename T>
double penalty_value(const nn::Model<T>& model, double reg_weight);

// Forward pass plus loss; with `grads` non-null also back-propagates and adds
// the penalty gradient of every penalized parameter.
template <typename T>
LossValue loss_eval(nn::Model<T>& model, const nn::Tensor<T>& x, const nn::Tensor<T>& y,
                    double reg_weight, nn::Phase phase, nn::Gradients<T>* grads = nullptr,
                    bool deterministic = true, Exec exec = Exec::parallel);

// Objective over a full set, evaluated in chunks.
template <typename T>
LossValue dataset_loss(nn::Model<T>& model, const nn::Tensor<T>& x, const nn::Tensor<T>& y,
                       double reg_weight, nn::Phase phase, std::size_t chunk,
                       Exec exec = Exec::parallel);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based, counted across calls of one Trainer
  double train_loss = 0.0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
};

using History = std::vector<EpochRecord>;

void write_history_csv(const std::filesystem::path& path, const History& history);

template <typename T>
struct TrainData {
  nn::Tensor<T> x;
  nn::Tensor<T> y;
  std::size_t size() const noexcept { return x.batch; }
};

template <typename T>
TrainData<T> make_train_data(const MatrixD& X, const MatrixD& Y);

// Mini-batch Adam loop. One Trainer keeps its Adam state across fit calls so
// that training can be resumed with a different frozen set.
template <typename T>
class Trainer {
 public:
  using EpochCallback = std::function<void(const EpochRecord&, nn::Model<T>&)>;

  Trainer(nn::Model<T>& model, TrainConfig config);

  // Runs `epochs` epochs with the given frozen set, then finalizes BN
  // population statistics on the training inputs (when epochs > 0).
  History fit(const TrainData<T>& train, const TrainData<T>* val, std::size_t epochs,
              const std::set<std::string>& frozen, Exec exec = Exec::parallel);
  History fit(const TrainData<T>& train, const TrainData<T>* val, Exec exec = Exec::parallel) {
    return fit(train, val, config_.epochs, config_.frozen_params, exec);
  }

  void on_epoch(EpochCallback cb) { callback_ = std::move(cb); }
  const AdamState& adam_state() const noexcept { return adam_; }
  const TrainConfig& config() const noexcept { return config_; }
  std::size_t epochs_done() const noexcept { return epochs_done_; }

 private:
  nn::Model<T>& model_;
  TrainConfig config_;
  AdamState adam_;
  EpochCallback callback_;
  std::size_t epochs_done_ = 0;
};

template <typename T>
History train(nn::Model<T>& model, const TrainData<T>& train_set, const std::type_identity_t<TrainData<T>>* val_set,
              const TrainConfig& config, Exec exec = Exec::parallel) {
  Trainer<T> t(model, config);
  return t.fit(train_set, val_set, exec);
}

}  // namespace nds::train
