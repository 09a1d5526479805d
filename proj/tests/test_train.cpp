#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "grad_check.hpp"
#include "nds/nn/init.hpp"
#include "nds/sampling/dataset.hpp"
#include "nds/sampling/dataspace.hpp"
#include "nds/train/train.hpp"

using namespace nds;
using namespace nds::nn;
using namespace nds::train;

namespace {

ModelSpec fc(std::size_t n) { return {{n, 1}, {{"fc", FcSpec{n, n, Activation::linear}}}}; }

TrainData<double> rand_pairs(std::size_t n, std::size_t width, std::uint64_t seed) {
  auto x = testing::random_tensor(n, width, 1, seed);
  auto y = testing::random_tensor(n, width, 1, seed + 1);
  return {x, y};
}

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "nds_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("loss examples") {
  Model<double> m(fc(2));
  Tensor<double> x(2, 2, 1), y(2, 2, 1);
  x.data = {0.3, -0.2, 1.0, 2.0};
  CHECK(loss_eval(m, x, y, 1e-4, Phase::train).total() == 0.0);

  m.params().at("fc/W").value[0] = 2.0;
  const auto pred = m.forward(x, Phase::train);
  CHECK(loss_eval(m, x, pred, 1e-4, Phase::train).total() == doctest::Approx(4e-4).epsilon(1e-12));

  Model<double> z(fc(2));
  y.data = {-1, 0, 0, -2};
  CHECK(loss_eval(z, x, y, 0.0, Phase::train).total() == doctest::Approx(2.5).epsilon(1e-15));
  Tensor<double> empty(0, 2, 1);
  CHECK_THROWS_AS(loss_eval(z, empty, empty, 0.0, Phase::train), InvalidArgument);
}

TEST_CASE("loss gradient including the penalty") {
  Model<double> m(ModelSpec{{4, 1},
                            {{"a", FcSpec{4, 5, Activation::relu}},
                             {"b", FcSpec{5, 4, Activation::linear}}}});
  init_params(m, 3);
  for (auto& v : m.params().at("a/b").value) v = 0.05;
  const auto d = rand_pairs(6, 4, 10);
  Gradients<double> g;
  const double lambda = 0.3;
  loss_eval(m, d.x, d.y, lambda, Phase::train, &g, true, Exec::serial);
  for (std::size_t p = 0; p < m.params().size(); ++p) {
    auto& par = m.params()[p];
    for (std::size_t i = 0; i < par.value.size(); ++i) {
      const double keep = par.value[i], h = 1e-6;
      par.value[i] = keep + h;
      const double lp = loss_eval(m, d.x, d.y, lambda, Phase::train).total();
      par.value[i] = keep - h;
      const double lm = loss_eval(m, d.x, d.y, lambda, Phase::train).total();
      par.value[i] = keep;
      CHECK(g[p][i] == doctest::Approx((lp - lm) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("adam step") {
  TrainConfig cfg;
  SUBCASE("zero gradient") {
    std::vector<double> p{1.5, -2.0};
    std::vector<double> g{0.0, 0.0};
    AdamMoments st;
    for (int k = 0; k < 10; ++k) adam_step<double>(p, g, st, cfg);
    CHECK(p == std::vector<double>{1.5, -2.0});
  }
  SUBCASE("first step") {
    std::vector<double> p{0.0};
    std::vector<double> g{1.0};
    AdamMoments st;
    adam_step<double>(p, g, st, cfg);
    CHECK(st.step == 1);
    CHECK(st.m[0] / (1 - cfg.beta1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p[0] == doctest::Approx(-1e-3).epsilon(1e-7));
  }
  SUBCASE("closed form over two steps") {
    std::vector<double> p{0.4};
    AdamMoments st;
    const double g1 = 0.7, g2 = -1.3;
    std::vector<double> g{g1};
    adam_step<double>(p, g, st, cfg);
    g[0] = g2;
    adam_step<double>(p, g, st, cfg);
    const double b1 = cfg.beta1, b2 = cfg.beta2, a = cfg.learning_rate, e = cfg.epsilon;
    const double th1 = 0.4 - a * g1 / (std::abs(g1) + e);
    const double m2 = (b1 * (1 - b1) * g1 + (1 - b1) * g2) / (1 - b1 * b1);
    const double v2 = (b2 * (1 - b2) * g1 * g1 + (1 - b2) * g2 * g2) / (1 - b2 * b2);
    const double th2 = th1 - a * m2 / (std::sqrt(v2) + e);
    CHECK(std::abs(p[0] - th2) <= 1e-12 * std::abs(th2));
  }
}

TEST_CASE("config validation") {
  TrainConfig c;
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.beta1 = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("training loop contracts") {
  const auto d = rand_pairs(50, 6, 1);
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.epochs = 0;
  Model<double> m(fc(6));
  init_params(m, 2);
  const auto before = m.params().at("fc/W").value;

  SUBCASE("zero epochs") {
    const auto h = train::train(m, d, nullptr, cfg);
    CHECK(h.empty());
    CHECK(m.params().at("fc/W").value == before);
  }
  SUBCASE("everything frozen") {
    cfg.epochs = 3;
    cfg.frozen_params = {"fc/W", "fc/b"};
    const auto h = train::train(m, d, &d, cfg);
    CHECK(h.size() == 3);
    CHECK(m.params().at("fc/W").value == before);
  }
  SUBCASE("partially frozen") {
    cfg.epochs = 3;
    cfg.frozen_params = {"fc/W"};
    train::train(m, d, nullptr, cfg);
    CHECK(m.params().at("fc/W").value == before);
    CHECK(m.params().at("fc/b").value != std::vector<double>(6, 0.0));
  }
  SUBCASE("unknown frozen name") {
    cfg.epochs = 1;
    cfg.frozen_params = {"nope/W"};
    CHECK_THROWS_AS(train::train(m, d, nullptr, cfg), InvalidArgument);
  }
  SUBCASE("deterministic") {
    cfg.epochs = 4;
    cfg.deterministic = true;
    cfg.seed = 9;
    Model<double> m2 = m;
    const auto h1 = train::train(m, d, &d, cfg);
    const auto h2 = train::train(m2, d, &d, cfg);
    CHECK(m.params().at("fc/W").value == m2.params().at("fc/W").value);
    CHECK(h1.back().train_loss == h2.back().train_loss);
  }
  SUBCASE("non-finite loss") {
    cfg.epochs = 2;
    auto bad = d;
    bad.y.data[17] = std::numeric_limits<double>::quiet_NaN();
    try {
      train::train(m, bad, nullptr, cfg);
      FAIL("expected a non-finite loss error");
    } catch (const NonFiniteLossError& e) {
      CHECK(e.epoch() == 1);
    }
  }
  SUBCASE("history csv") {
    cfg.epochs = 2;
    const auto h = train::train(m, d, &d, cfg);
    const auto p = temp_path("hist.csv");
    write_history_csv(p, h);
    std::ifstream in(p);
    std::string header;
    std::getline(in, header);
    CHECK(header == "epoch,train_loss,val_loss");
  }
}

TEST_CASE("BN statistics are finalized after training") {
  Model<double> m(ModelSpec{{5, 1},
                            {{"c", ConvSpec{2, 1, 1, 2, Activation::relu}},
                             {"bn", BnSpec{}},
                             {"o", ConvSpec{1, 1, 2, 1, Activation::linear}}}});
  init_params(m, 1);
  const auto d = rand_pairs(40, 5, 3);
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.epochs = 2;
  train::train(m, d, nullptr, cfg);
  CHECK(m.bn_finalized());
  CHECK(m.params().at("bn/var").value != std::vector<double>(5, 1.0));
}

TEST_CASE("desk-scale single FC on Case-1 reduces its loss") {
  using namespace nds::sampling;
  const auto space = make_dataspace(CaseId::case1);
  const auto tr = generate_dataset(space, Split::train, 1, 1024);
  const auto va = generate_dataset(space, Split::val, 1, 256);
  const auto [xs, ys] = compute_norm_stats(tr);
  const auto td = make_train_data<float>(normalize(tr.X, xs), normalize(tr.Y, ys));
  const auto vd = make_train_data<float>(normalize(va.X, xs), normalize(va.Y, ys));
  Model<float> m(fc(101));
  init_params(m, 4);
  TrainConfig cfg;
  cfg.batch_size = 64;
  cfg.epochs = 10;
  cfg.reg_weight = 1e-2;
  const double initial = dataset_loss(m, td.x, td.y, cfg.reg_weight, Phase::train, 256).total();
  const auto h = train::train(m, td, &vd, cfg);
  CHECK(h.back().train_loss < initial);
  for (const auto& r : h) CHECK(r.val_loss < 2.0 * r.train_loss);
}
