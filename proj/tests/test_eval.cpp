#include <cmath>

#include "doctest.h"
#include "grad_check.hpp"
#include "nds/eval/eval.hpp"
#include "nds/nn/init.hpp"
#include "nds/sparse/sparsify.hpp"
#include "nds/sampling/dataspace.hpp"
#include "nds/train/train.hpp"

using namespace nds;
using namespace nds::nn;
using namespace nds::eval;

namespace {

Model<double> identity(std::size_t n) {
  Model<double> m(ModelSpec{{n, 1}, {{"fc", FcSpec{n, n, Activation::linear}}}});
  auto& W = m.params().at("fc/W").value;
  for (std::size_t i = 0; i < n; ++i) W[i * n + i] = 1.0;
  return m;
}

}  // namespace

TEST_CASE("relative error") {
  const std::vector<double> y{1.0, 0.0}, yh{1.0, 1.0}, z{0.0, 0.0};
  CHECK(relative_error(y, y) == 0.0);
  CHECK(relative_error(y, z) == doctest::Approx(100.0));
  CHECK(relative_error(y, yh) == doctest::Approx(100.0));
  CHECK_THROWS_AS(relative_error(z, y), InvalidArgument);
  const std::vector<double> r{3.0, -1.0, 2.0}, e{0.1, 0.2, -0.05};
  std::vector<double> p1(3), p2(3);
  for (int i = 0; i < 3; ++i) {
    p1[i] = r[i] + e[i];
    p2[i] = r[i] + 2 * e[i];
  }
  CHECK(relative_error(r, p2) == doctest::Approx(2 * relative_error(r, p1)).epsilon(1e-12));
}

TEST_CASE("mse metric") {
  auto id = identity(2);
  MatrixD x(1, 2, std::vector<double>{0.0, 0.0});
  MatrixD y(1, 2, std::vector<double>{3.0, 4.0});
  CHECK(mse_metric(id, x, y) == doctest::Approx(25.0));
  CHECK(mse_metric(id, y, y) == 0.0);

  Model<double> bn(ModelSpec{{2, 1}, {{"bn", BnSpec{}}}});
  CHECK_THROWS_AS(mse_metric(bn, x, y), Error);
}

TEST_CASE("predict round trip") {
  auto id = identity(4);
  MatrixD x(3, 4, std::vector<double>{1, 2, 3, 4, -1, 0.5, 2, 8, 0, 0, 1, 1});
  const auto stats = sampling::compute_norm_stats(x);
  const auto out = predict(id, x, stats, stats);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(out.data()[i] - x.data()[i]) <= 1e-12 * std::max(1.0, std::abs(x.data()[i])));
  sampling::NormStats wrong{{0, 0}, {1, 1}};
  CHECK_THROWS_AS(predict(id, x, wrong, stats), ShapeError);
}

TEST_CASE("trained FC model beats the mean predictor") {
  using namespace nds::sampling;
  const auto space = make_dataspace(CaseId::case1);
  const auto tr = generate_dataset(space, Split::train, 3, 1024);
  const auto te = generate_dataset(space, Split::test, 3, 64);
  const auto [xs, ys] = compute_norm_stats(tr);
  Model<double> m(ModelSpec{{101, 1}, {{"fc", FcSpec{101, 101, Activation::linear}}}});
  init_params(m, 1);
  train::TrainConfig cfg;
  cfg.batch_size = 64;
  cfg.epochs = 40;
  cfg.reg_weight = 1e-2;
  train::train(m, train::make_train_data<double>(normalize(tr.X, xs), normalize(tr.Y, ys)), nullptr, cfg);

  const auto yn = normalize(te.Y, ys);
  double ceiling = 0;
  for (double v : yn.storage()) ceiling += v * v;
  ceiling /= static_cast<double>(yn.rows());
  Model<double> zero(ModelSpec{{101, 1}, {{"fc", FcSpec{101, 101, Activation::linear}}}});
  CHECK(mse_metric(zero, normalize(te.X, xs), yn) == doctest::Approx(ceiling).epsilon(1e-12));

  const auto rep = evaluate(m, te, xs, ys);
  CHECK(rep.mse < ceiling);
  CHECK(rep.n_test == 64);
  CHECK(rep.rel_err_pct.size() == 64);
  CHECK(rep.mean_rel_err_pct < 15.0);
  const auto j = rep.to_json();
  for (const char* key : {"case", "model", "mse", "mean_rel_err_pct", "n_test"}) CHECK(j.contains(key));
}

TEST_CASE("trained lower-triangular model keeps displacement component 0 at zero") {
  using namespace nds::sampling;
  const auto space = make_dataspace(CaseId::case1);
  const auto tr = generate_dataset(space, Split::train, 4, 1024);
  const auto te = generate_dataset(space, Split::test, 4, 32);
  const auto [xs, ys] = compute_norm_stats(tr);
  auto mask = std::make_shared<const BitMask>(sparse::structured_mask(sparse::PatternKind::lower_triangular, 101));
  Model<double> m(ModelSpec{{101, 1}, {{"sc", ScSpec{mask, Activation::linear}}}});
  init_params(m, 2);
  train::TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.epochs = 40;
  cfg.reg_weight = 1e-2;
  train::train(m, train::make_train_data<double>(normalize(tr.X, xs), normalize(tr.Y, ys)), nullptr, cfg);
  const auto pred = predict(m, te.X, xs, ys);
  double worst = 0;
  for (std::size_t i = 0; i < pred.rows(); ++i) worst = std::max(worst, std::abs(pred(i, 0)));
  CHECK(worst < 1e-6);
}
