#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "nds/common/error.hpp"
#include "nds/sampling/dataset.hpp"
#include "nds/sampling/dataspace.hpp"
#include "nds/sampling/io.hpp"
#include "nds/sampling/lhs.hpp"

using namespace nds;
using namespace nds::sampling;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

fs::path temp_path(const std::string& name) {
  auto dir = fs::temp_directory_path() / "nds_tests";
  fs::create_directories(dir);
  return dir / name;
}

void check_stratified(const MatrixD& m) {
  const auto n = m.rows();
  for (std::size_t d = 0; d < m.cols(); ++d) {
    std::vector<std::size_t> strata;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = m(i, d);
      REQUIRE(v >= 0.0);
      REQUIRE(v < 1.0);
      strata.push_back(static_cast<std::size_t>(std::floor(v * static_cast<double>(n))));
    }
    std::sort(strata.begin(), strata.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(strata[i] == i);
  }
}

}  // namespace

TEST_CASE("Feistel permutation is a bijection") {
  for (std::uint64_t n : {1u, 2u, 3u, 17u, 64u, 1000u}) {
    IndexPermutation p(n, 99);
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < n; ++i) seen.insert(p(i));
    CHECK(seen.size() == n);
    CHECK(*seen.rbegin() == n - 1);
  }
}

TEST_CASE("LHS stratification and determinism") {
  for (std::size_t n : {1u, 2u, 4u, 7u, 64u}) check_stratified(lhs_sample(n, 15, 42));
  CHECK(lhs_sample(64, 3, 7) == lhs_sample(64, 3, 7));
  CHECK(!(lhs_sample(64, 3, 7) == lhs_sample(64, 3, 8)));
  const auto m = lhs_sample(10, 4, 5);
  std::vector<double> row(4);
  lhs_row(6, 10, 5, row);
  for (std::size_t d = 0; d < 4; ++d) CHECK(row[d] == m(6, d));
}

TEST_CASE("draw_load_params") {
  const auto c1 = make_dataspace(CaseId::case1);
  std::vector<double> mid(c1.n_unit_dims(), 0.5);
  const auto l = draw_load_params(c1, mid);
  for (std::size_t i = 0; i < l.n_terms(); ++i) {
    CHECK(l.amplitudes[i] == doctest::Approx(5.0));
    CHECK(l.frequencies[i] == doctest::Approx(3 * pi));
    CHECK(l.phases[i] == doctest::Approx(pi));
  }
  std::vector<double> zeros(c1.n_unit_dims(), 0.0);
  const auto z = draw_load_params(c1, zeros);
  for (std::size_t i = 0; i < z.n_terms(); ++i) {
    CHECK(z.amplitudes[i] == 0.0);
    CHECK(z.frequencies[i] == 0.0);
    CHECK(z.phases[i] == 0.0);
  }
  const auto c5 = make_dataspace(CaseId::case5);
  std::vector<double> top(c5.n_unit_dims(), std::nextafter(1.0, 0.0));
  const auto t = draw_load_params(c5, top);
  CHECK(t.amplitudes[0] < 20.0);
  CHECK(t.amplitudes[0] > 19.999);
  CHECK(t.phases[0] < 2 * pi);
  std::vector<double> wrong(c1.n_unit_dims() + 1, 0.5);
  CHECK_THROWS_AS(draw_load_params(c1, wrong), InvalidArgument);
}

TEST_CASE("dataspace table values") {
  const auto c1 = make_dataspace(CaseId::case1);
  CHECK(c1.sizes.train == (1u << 18));
  CHECK(c1.sizes.val == 5000);
  CHECK(c1.sizes.test == 5000);
  CHECK(c1.n_points() == 101);
  for (auto id : {CaseId::case3, CaseId::case4, CaseId::case5, CaseId::case6, CaseId::case7})
    CHECK(make_dataspace(id).n_points() == 201);
  CHECK(make_dataspace(CaseId::case6).is_mdof());
  CHECK(make_dataspace(CaseId::case6).is_linear());
  CHECK(!make_dataspace(CaseId::case5).is_linear());
  const auto b1 = case6_subrange(1);
  CHECK(b1.frequency.lo == doctest::Approx(10 * pi));
  CHECK(b1.frequency.hi == doctest::Approx(15 * pi));
  CHECK_THROWS_AS(case6_subrange(3), InvalidArgument);
}

TEST_CASE("drawn parameters stay inside their ranges") {
  for (int id = 1; id <= 7; ++id) {
    const auto space = make_dataspace(static_cast<CaseId>(id));
    const std::size_t n = 10000 / space.n_terms;
    for (std::size_t i = 0; i < n; ++i) {
      const auto l = sample_load(space, Split::train, 3, i, n);
      for (std::size_t j = 0; j < l.n_terms(); ++j) {
        CHECK(space.amplitude.contains(l.amplitudes[j]));
        CHECK(space.frequency.contains(l.frequencies[j]));
        CHECK(l.phases[j] >= 0.0);
        CHECK(l.phases[j] < 2 * pi);
      }
    }
  }
}

TEST_CASE("generate_dataset") {
  auto space = make_dataspace(CaseId::case1);
  const auto d = generate_dataset(space, Split::train, 7, 32);
  CHECK(d.n_samples() == 32);
  CHECK(d.n_points() == 101);
  for (std::size_t i = 0; i < 32; ++i) CHECK(d.Y(i, 0) == 0.0);
  CHECK(generate_dataset(space, Split::train, 7, 32) == d);
  CHECK(generate_dataset(space, Split::train, 7, 32, Exec::serial) == d);
  SUBCASE("prefix property") {
    const auto small = generate_dataset(space, Split::train, 7, 8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t k = 0; k < 101; ++k) {
        CHECK(small.X(i, k) == d.X(i, k));
        CHECK(small.Y(i, k) == d.Y(i, k));
      }
  }
  SUBCASE("splits differ") {
    const auto v = generate_dataset(space, Split::val, 7, 32);
    CHECK(!(v.X == d.X));
  }
  SUBCASE("acceleration dataset starts at p(0)/m") {
    auto acc = make_dataspace(CaseId::case2, ResponseKind::acceleration);
    const auto a = generate_dataset(acc, Split::test, 1, 4);
    const double m = std::get<dynamics::SdofParams>(acc.system).mass;
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.Y(i, 0) == doctest::Approx(a.X(i, 0) / m).epsilon(1e-12));
  }
  SUBCASE("nonlinear and MDOF rows") {
    for (auto id : {CaseId::case5, CaseId::case6, CaseId::case7}) {
      const auto nd = generate_dataset(make_dataspace(id), Split::train, 2, 2);
      CHECK(nd.n_points() == 201);
      for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(nd.Y(i, 0)) < 1e-9);
    }
  }
}

TEST_CASE("normalization") {
  MatrixD m(2, 2, std::vector<double>{1.0, 0.0, 3.0, 0.0});
  const auto s = compute_norm_stats(m);
  CHECK(s.mean[0] == 2.0);
  CHECK(s.var[0] == 1.0);
  CHECK(s.mean[1] == 0.0);
  CHECK(s.var[1] == 0.0);
  const auto n = normalize(m, s);
  CHECK(n(0, 0) == doctest::Approx(-0.999999995).epsilon(1e-12));
  CHECK(n(1, 0) == doctest::Approx(0.999999995).epsilon(1e-12));
  CHECK(n(0, 1) == 0.0);
  MatrixD one(1, 3, std::vector<double>{1, 2, 3});
  for (double v : compute_norm_stats(one).var) CHECK(v == 0.0);

  std::mt19937_64 gen(1);
  std::normal_distribution<double> g(3.0, 5.0);
  MatrixD r(50, 20);
  for (auto& v : r.storage()) v = g(gen);
  const auto rs = compute_norm_stats(r);
  const auto back = normalize(normalize(r, rs), rs, Direction::inverse);
  for (std::size_t i = 0; i < r.size(); ++i)
    CHECK(std::abs(back.data()[i] - r.data()[i]) <= 1e-12 * std::abs(r.data()[i]));
  MatrixD wrong(2, 3);
  CHECK_THROWS_AS(normalize(wrong, s), ShapeError);
}

TEST_CASE("dataset file round trip and errors") {
  const auto d = generate_dataset(make_dataspace(CaseId::case1), Split::train, 5, 3);
  const auto path = temp_path("rt.nds");
  write_dataset(path, d);
  CHECK(read_dataset(path) == d);

  SUBCASE("bad magic") {
    auto p = temp_path("magic.nds");
    fs::copy_file(path, p, fs::copy_options::overwrite_existing);
    std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXX", 4);
    f.close();
    CHECK_THROWS_AS(read_dataset(p), BadMagicError);
  }
  SUBCASE("version mismatch") {
    auto p = temp_path("version.nds");
    fs::copy_file(path, p, fs::copy_options::overwrite_existing);
    std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const std::uint32_t v = 99;
    f.write(reinterpret_cast<const char*>(&v), 4);
    f.close();
    CHECK_THROWS_AS(read_dataset(p), VersionError);
  }
  SUBCASE("truncated payload") {
    auto p = temp_path("trunc.nds");
    fs::copy_file(path, p, fs::copy_options::overwrite_existing);
    fs::resize_file(p, fs::file_size(p) - 8);
    CHECK_THROWS_AS(read_dataset(p), TruncatedError);
  }
  SUBCASE("norm stats") {
    const auto [xs, ys] = compute_norm_stats(d);
    const auto p = temp_path("stats.nst");
    write_norm_stats(p, ys);
    CHECK(read_norm_stats(p) == ys);
  }
}
