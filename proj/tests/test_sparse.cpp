#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "grad_check.hpp"
#include "nds/nn/init.hpp"
#include "nds/sparse/sparsify.hpp"

using namespace nds;
using namespace nds::nn;
using namespace nds::sparse;

namespace {

MatrixD random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  MatrixD m(r, c);
  for (auto& v : m.storage()) v = d(gen);
  return m;
}

std::size_t total(const ModelSpec& s) { return param_count(s).total_trainable; }

std::shared_ptr<const BitMask> shared(BitMask m) { return std::make_shared<const BitMask>(std::move(m)); }

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "nds_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::vector<std::pair<std::string, Shape>> layout(const ModelSpec& s) {
  std::vector<std::pair<std::string, Shape>> out;
  const auto shapes = s.infer_shapes();
  for (std::size_t i = 0; i < s.layers.size(); ++i) out.emplace_back(kind_name(s.layers[i].kind), shapes[i]);
  return out;
}

}  // namespace

TEST_CASE("sparsity_mask") {
  MatrixD w(2, 2, std::vector<double>{1, 0.01, 0.5, -0.06});
  const auto [mask, rep] = sparsity_mask(w);
  CHECK(mask(0, 0));
  CHECK(!mask(0, 1));
  CHECK(mask(1, 0));
  CHECK(mask(1, 1));
  CHECK(rep.threshold == doctest::Approx(0.05));
  CHECK(rep.nnz == 3);

  MatrixD eq(3, 3, 0.7);
  CHECK(sparsity_mask(eq).first.count() == 9);
  CHECK_THROWS_AS(sparsity_mask(MatrixD(3, 3, 0.0)), InvalidArgument);

  MatrixD tie(1, 2, std::vector<double>{1.0, 0.05});
  CHECK(sparsity_mask(tie).first(0, 1));

  const auto r = random_matrix(20, 20, 3);
  for (double c : {-3.0, 0.125, 1e6}) {
    MatrixD s = r;
    for (auto& v : s.storage()) v *= c;
    CHECK(sparsity_mask(s).first == sparsity_mask(r).first);
  }
}

TEST_CASE("structured masks") {
  CHECK(structured_mask(PatternKind::lower_triangular, 101).count() == 5151);
  const auto band = structured_mask(PatternKind::banded_lower, 201, 100);
  CHECK(band.count() == 15251);
  CHECK(band.count() + 201 == 15452);
  CHECK(structured_mask(PatternKind::banded_lower, 30, 29) ==
        structured_mask(PatternKind::lower_triangular, 30));
  for (std::size_t w : {0u, 3u, 10u}) {
    std::size_t expect = 0;
    for (std::size_t i = 0; i < 25; ++i) expect += std::min(i, w) + 1;
    CHECK(structured_mask(PatternKind::banded_lower, 25, w).count() == expect);
  }
  CHECK_THROWS_AS(structured_mask(PatternKind::banded_lower, 10, 10), InvalidArgument);
  CHECK_THROWS_AS(structured_mask(PatternKind::lower_triangular, 0), InvalidArgument);
}

TEST_CASE("pattern fitting") {
  const std::size_t n = 50;
  MatrixD lower(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) lower(i, j) = 1.0;
  auto fit = fit_pattern(sparsity_mask(lower).second);
  CHECK(fit.kind == PatternKind::lower_triangular);

  MatrixD banded(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i >= 5 ? i - 5 : 0; j <= i; ++j) banded(i, j) = 1.0;
  fit = fit_pattern(sparsity_mask(banded).second);
  CHECK(fit.kind == PatternKind::banded_lower);
  CHECK(fit.band_width == 5);

  fit = fit_pattern(sparsity_mask(random_matrix(n, n, 1)).second);
  CHECK(fit.kind == PatternKind::none);
  const auto j = sparsity_mask(banded).second.to_json();
  for (const char* key : {"threshold", "nnz", "lower_fraction", "band_width", "histogram"}) CHECK(j.contains(key));
}

TEST_CASE("mask file") {
  const auto m = structured_mask(PatternKind::banded_lower, 13, 4);
  const auto p = temp_path("m.nmk");
  write_mask(p, m);
  CHECK(read_mask(p) == m);
}

TEST_CASE("FC to SC transfer") {
  const std::size_t n = 8;
  Model<double> fc(ModelSpec{{n, 1}, {{"fc", FcSpec{n, n, Activation::linear}}}});
  init_params(fc, 5);
  for (auto& v : fc.params().at("fc/b").value) v = 0.3;
  const auto x = testing::random_tensor(6, n, 1, 2);

  SUBCASE("all-ones mask is exact") {
    auto t = build_sc_from_fc(fc.params(), "fc", shared(BitMask(n, n, true)));
    Model<double> sc(ModelSpec{{n, 1}, {{"sc", ScSpec{t.mask, Activation::linear}}}});
    sc.params().at("sc/W").value = t.weights;
    sc.params().at("sc/b").value = t.biases;
    CHECK(sc.forward(x, Phase::eval) == fc.forward(x, Phase::eval));
  }
  SUBCASE("dropped weights bound the difference") {
    auto mask = structured_mask(PatternKind::lower_triangular, n);
    auto t = build_sc_from_fc(fc.params(), "fc", shared(mask));
    Model<double> sc(ModelSpec{{n, 1}, {{"sc", ScSpec{t.mask, Activation::linear}}}});
    sc.params().at("sc/W").value = t.weights;
    sc.params().at("sc/b").value = t.biases;
    const auto ys = sc.forward(x, Phase::eval);
    const auto yf = fc.forward(x, Phase::eval);
    const auto& W = fc.params().at("fc/W").value;
    for (std::size_t s = 0; s < x.batch; ++s) {
      double diff = 0, dropped = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (!mask(i, j)) acc += W[i * n + j] * x.at(s, j, 0);
        dropped += acc * acc;
        const double d = yf.at(s, i, 0) - ys.at(s, i, 0);
        diff += d * d;
      }
      CHECK(std::sqrt(diff) == doctest::Approx(std::sqrt(dropped)).epsilon(1e-12));
    }
  }
  SUBCASE("masked entries stay zero through training") {
    auto t = build_sc_from_fc(fc.params(), "fc", shared(structured_mask(PatternKind::lower_triangular, n)));
    Model<double> sc(ModelSpec{{n, 1}, {{"sc", ScSpec{t.mask, Activation::linear}}}});
    sc.params().at("sc/W").value = t.weights;
    train::TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 4;
    train::train(sc, train::TrainData<double>{x, testing::random_tensor(6, n, 1, 3)}, nullptr, cfg);
    const auto& W = sc.params().at("sc/W").value;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) CHECK(W[i * n + j] == 0.0);
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(build_sc_from_fc(fc.params(), "fc", shared(BitMask(n, n + 1, true))), ShapeError);
  }
}

TEST_CASE("template parameter counts") {
  const auto lower = shared(structured_mask(PatternKind::lower_triangular, 101));
  const auto s6 = build_sparse_template(101, 6, lower);
  CHECK(total(s6) == 9169);
  const auto pc = param_count(s6);
  std::size_t conv = 0, bn = 0, sc = 0;
  for (const auto& l : pc.layers) {
    if (l.kind == "conv1d") conv += l.trainable;
    if (l.kind == "bn") {
      bn += l.trainable;
      CHECK(l.trainable == 202);
    }
    if (l.kind == "sc") sc += l.trainable;
  }
  CHECK(conv == 2705);
  CHECK(sc == 5252);
  CHECK(bn == 6 * 202);

  const auto band = shared(structured_mask(PatternKind::banded_lower, 201, 100));
  CHECK(total(build_sparse_template(201, 9, band)) == 23359);

  const auto s1 = build_sparse_template(101, 1, lower);
  CHECK(s1.layers.size() == 4);
  CHECK(std::string(kind_name(s1.layers[0].kind)) == "conv1d");
  CHECK(std::string(kind_name(s1.layers[1].kind)) == "bn");
  CHECK(std::string(kind_name(s1.layers[2].kind)) == "conv1d");
  CHECK(std::string(kind_name(s1.layers[3].kind)) == "sc");
  CHECK(param_count(s1).layers[0].trainable == 48);
  CHECK(param_count(s1).layers[2].trainable == 17);

  const auto cd = build_conv_dense_template(201, 5, 4);
  CHECK(total(cd) == 166595);
  for (const auto& l : param_count(cd).layers)
    if (l.kind == "fc") CHECK(l.trainable == 40602);
  const auto dense = build_dense_model(201, 5);
  CHECK(total(dense) == 203010);
  CHECK(100.0 * (1.0 - 166595.0 / 203010.0) == doctest::Approx(17.94).epsilon(1e-3));
  CHECK(total(build_conv_dense_template(201, 0, 4)) == 203010);
  CHECK(param_count(ModelSpec{{101, 1}, {{"fc", FcSpec{101, 101}}}}).total_trainable == 10302);
  CHECK_THROWS_AS(build_sparse_template(101, 0, lower), InvalidArgument);
}

TEST_CASE("growth") {
  const std::size_t n = 11;
  const auto lower = shared(structured_mask(PatternKind::lower_triangular, n));
  TemplateOptions opt;
  opt.n_c = 3;
  Model<double> base(build_sparse_template(n, 1, lower, opt));
  init_params(base, 1);

  auto grown = insert_bn_conv(base, 2);
  CHECK(layout(grown.model.spec()) == layout(build_sparse_template(n, 2, lower, opt)));
  CHECK(grown.new_layers.size() == 2);
  for (const auto& p : base.params()) CHECK(grown.model.params().at(p.name).value == p.value);
  const auto x = testing::random_tensor(5, n, 1, 4);
  const auto y = grown.model.forward(x, Phase::train);
  CHECK(y.height == n);
  for (double v : y.data) CHECK(std::isfinite(v));

  Model<double> g(build_sparse_template(101, 1, lower->rows() == 101 ? lower : shared(structured_mask(PatternKind::lower_triangular, 101))));
  for (int k = 0; k < 5; ++k) g = insert_bn_conv(g, static_cast<std::uint64_t>(k)).model;
  CHECK(count_bn_layers(g.spec()) == 6);
  CHECK(total(g.spec()) == 9169);

  Model<double> plain(ModelSpec{{4, 1}, {{"fc", FcSpec{4, 4}}}});
  CHECK_THROWS_AS(insert_bn_conv(plain, 1), InvalidArgument);
}

TEST_CASE("two-phase training") {
  const std::size_t n = 9;
  const auto lower = shared(structured_mask(PatternKind::lower_triangular, n));
  TemplateOptions opt;
  opt.n_c = 2;
  Model<double> base(build_sparse_template(n, 1, lower, opt));
  init_params(base, 3);
  auto grown = insert_bn_conv(base, 4);
  train::TrainData<double> d{testing::random_tensor(64, n, 1, 5), testing::random_tensor(64, n, 1, 6)};
  train::TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.learning_rate = 1e-2;

  SUBCASE("phase one freezes old parameters") {
    auto m = grown.model;
    const double before = train::dataset_loss(m, d.x, d.y, cfg.reg_weight, Phase::train, 64).total();
    two_phase_train(m, grown.new_layers, d, nullptr, cfg, 5, 0);
    for (const auto& p : base.params())
      if (p.trainable) CHECK(m.params().at(p.name).value == p.value);
    CHECK(m.params().at(grown.new_layers[0] + "/W").value !=
          grown.model.params().at(grown.new_layers[0] + "/W").value);
    const double after = train::dataset_loss(m, d.x, d.y, cfg.reg_weight, Phase::train, 64).total();
    CHECK(after < before);
  }
  SUBCASE("split (0, E) is ordinary training") {
    auto a = grown.model;
    auto b = grown.model;
    cfg.epochs = 3;
    two_phase_train(a, grown.new_layers, d, nullptr, cfg, 0, 3);
    train::train(b, d, nullptr, cfg);
    for (std::size_t i = 0; i < a.params().size(); ++i) CHECK(a.params()[i].value == b.params()[i].value);
  }
  SUBCASE("empty new-layer set") {
    auto m = grown.model;
    CHECK_THROWS_AS(two_phase_train(m, {}, d, nullptr, cfg, 1, 1), InvalidArgument);
  }
  const auto plan = default_growth_plan(3, 11);
  CHECK(plan.phase1_epochs == 5);
  CHECK(plan.phase2_epochs == 6);
}
