#include "nds/eval/eval.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "nds/common/error.hpp"

namespace nds::eval {

double relative_error(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw ShapeError("relative_error: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
    den += y[i] * y[i];
  }
  if (den == 0.0) throw InvalidArgument("relative_error: zero reference vector");
  return 100.0 * std::sqrt(num) / std::sqrt(den);
}

namespace {

template <typename T>
MatrixD forward_rows(nn::Model<T>& model, const MatrixD& x, std::size_t chunk, Exec exec) {
  if (chunk == 0) throw InvalidArgument("chunk must be positive");
  if (model.has_batch_norm() && !model.bn_finalized())
    throw Error("model has unfinalized BN population statistics");
  if (x.cols() != model.spec().input.height || model.spec().input.channels != 1)
    throw ShapeError("input width does not match the model");
  const auto out_shape = model.spec().output_shape();
  MatrixD out(x.rows(), out_shape.height * out_shape.channels);
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < x.rows(); start += chunk) {
    const std::size_t n = std::min(chunk, x.rows() - start);
    rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = start + i;
    const auto y = model.forward(nn::tensor_from_rows<T>(x, rows), nn::Phase::eval, exec);
    for (std::size_t i = 0; i < y.data.size(); ++i)
      out.data()[start * out.cols() + i] = static_cast<double>(y.data[i]);
  }
  return out;
}

}  // namespace

template <typename T>
double mse_metric(nn::Model<T>& model, const MatrixD& x_norm, const MatrixD& y_norm,
                  std::size_t chunk, Exec exec) {
  if (x_norm.rows() == 0) throw InvalidArgument("mse_metric: empty set");
  if (x_norm.rows() != y_norm.rows()) throw ShapeError("mse_metric: row count mismatch");
  const auto pred = forward_rows(model, x_norm, chunk, exec);
  if (pred.cols() != y_norm.cols()) throw ShapeError("mse_metric: target width mismatch");
  double sse = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred.data()[i] - y_norm.data()[i];
    sse += d * d;
  }
  return sse / static_cast<double>(x_norm.rows());
}

template <typename T>
MatrixD predict(nn::Model<T>& model, const MatrixD& x_raw, const sampling::NormStats& x_stats,
                const sampling::NormStats& y_stats, std::size_t chunk, Exec exec) {
  if (x_stats.size() != x_raw.cols()) throw ShapeError("predict: input stats do not match input width");
  const auto y_norm = forward_rows(model, sampling::normalize(x_raw, x_stats), chunk, exec);
  if (y_stats.size() != y_norm.cols()) throw ShapeError("predict: output stats do not match model output");
  return sampling::normalize(y_norm, y_stats, sampling::Direction::inverse);
}

nlohmann::json EvalReport::to_json() const {
  return {{"case", case_name},
          {"model", model_name},
          {"mse", mse},
          {"mean_rel_err_pct", mean_rel_err_pct},
          {"n_test", n_test}};
}

template <typename T>
EvalReport evaluate(nn::Model<T>& model, const sampling::Dataset& test,
                    const sampling::NormStats& x_stats, const sampling::NormStats& y_stats,
                    std::size_t chunk, Exec exec) {
  EvalReport rep;
  rep.case_name = sampling::to_string(test.meta.case_id);
  rep.n_test = test.n_samples();
  rep.mse = mse_metric(model, sampling::normalize(test.X, x_stats),
                       sampling::normalize(test.Y, y_stats), chunk, exec);
  const auto pred = predict(model, test.X, x_stats, y_stats, chunk, exec);
  double sum = 0.0;
  for (std::size_t i = 0; i < test.n_samples(); ++i) {
    rep.rel_err_pct.push_back(relative_error(test.Y.row(i), pred.row(i)));
    sum += rep.rel_err_pct.back();
  }
  rep.mean_rel_err_pct = rep.n_test ? sum / static_cast<double>(rep.n_test) : 0.0;
  return rep;
}

void write_report_json(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << report.to_json().dump(2) << '\n';
}

void write_per_sample_csv(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "sample_id,rel_err_pct\n" << std::setprecision(17);
  for (std::size_t i = 0; i < report.rel_err_pct.size(); ++i)
    out << i << ',' << report.rel_err_pct[i] << '\n';
}

void write_prediction_csv(const std::filesystem::path& path, std::span<const double> t,
                          std::span<const double> y_true, std::span<const double> y_pred) {
  if (t.size() != y_true.size() || t.size() != y_pred.size())
    throw ShapeError("prediction columns have different lengths");
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "t,y_true,y_pred\n" << std::setprecision(17);
  for (std::size_t i = 0; i < t.size(); ++i) out << t[i] << ',' << y_true[i] << ',' << y_pred[i] << '\n';
}

template double mse_metric(nn::Model<float>&, const MatrixD&, const MatrixD&, std::size_t, Exec);
template double mse_metric(nn::Model<double>&, const MatrixD&, const MatrixD&, std::size_t, Exec);
template MatrixD predict(nn::Model<float>&, const MatrixD&, const sampling::NormStats&,
                         const sampling::NormStats&, std::size_t, Exec);
template MatrixD predict(nn::Model<double>&, const MatrixD&, const sampling::NormStats&,
                         const sampling::NormStats&, std::size_t, Exec);
template EvalReport evaluate(nn::Model<float>&, const sampling::Dataset&,
                             const sampling::NormStats&, const sampling::NormStats&, std::size_t,
                             Exec);
template EvalReport evaluate(nn::Model<double>&, const sampling::Dataset&,
                             const sampling::NormStats&, const sampling::NormStats&, std::size_t,
                             Exec);

}  // namespace nds::eval
