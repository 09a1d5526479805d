#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nds/common/matrix.hpp"
#include "nds/nn/model.hpp"
#include "nds/sampling/dataset.hpp"

namespace nds::eval {

// |y - y_hat| / |y| in percent. Throws on a zero reference.
double relative_error(std::span<const double> y, std::span<const double> y_hat);

// Mean squared error (1/N) sum |f(x_i) - y_i|^2 on normalized data, eval phase.
template <typename T>
double mse_metric(nn::Model<T>& model, const MatrixD& x_norm, const MatrixD& y_norm,
                  std::size_t chunk = 1024, Exec exec = Exec::parallel);

// Raw load series in, physical response series out.
template <typename T>
MatrixD predict(nn::Model<T>& model, const MatrixD& x_raw, const sampling::NormStats& x_stats,
                const sampling::NormStats& y_stats, std::size_t chunk = 1024,
                Exec exec = Exec::parallel);

struct EvalReport {
  std::string case_name;
  std::string model_name;
  double mse = 0.0;
  double mean_rel_err_pct = 0.0;
  std::size_t n_test = 0;
  std::vector<double> rel_err_pct;
  std::size_t exported = 0;

  nlohmann::json to_json() const;
};

template <typename T>
EvalReport evaluate(nn::Model<T>& model, const sampling::Dataset& test,
                    const sampling::NormStats& x_stats, const sampling::NormStats& y_stats,
                    std::size_t chunk = 1024, Exec exec = Exec::parallel);

void write_report_json(const std::filesystem::path& path, const EvalReport& report);
void write_per_sample_csv(const std::filesystem::path& path, const EvalReport& report);
// Columns t, y_true, y_pred.
void write_prediction_csv(const std::filesystem::path& path, std::span<const double> t,
                          std::span<const double> y_true, std::span<const double> y_pred);

}  // namespace nds::eval
