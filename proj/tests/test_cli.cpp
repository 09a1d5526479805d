#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "nds/cli/cli.hpp"
#include "nds/cli/config.hpp"

using namespace nds;
using namespace nds::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nds");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / "nds_cli_tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("config parsing") {
  const auto d = RunConfig{};
  CHECK(d.train.reg_weight == 1e-4);
  CHECK(d.train.learning_rate == 1e-3);
  CHECK(d.train.batch_size == 1024);
  CHECK(d.train.epochs == 300);
  CHECK(d.model.n_c == 16);
  CHECK(d.model.bn_eps == 1e-8);

  const auto c = config_from_json(nlohmann::json::parse(R"({"seed": 3, "train": {"epochs": 7}, "dataspace": {"case": 5, "n_train": 10}, "system": {"cubic_ratio": 0.5}})"));
  CHECK(c.seed == 3);
  CHECK(c.train.epochs == 7);
  const auto space = c.make_dataspace();
  CHECK(space.sizes.train == 10);
  CHECK(std::get<dynamics::SdofParams>(space.system).cubic_coeff ==
        doctest::Approx(0.5 * std::get<dynamics::SdofParams>(space.system).stiffness));

  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"trian": {}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"train": {"epoch": 3}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"train": {"epochs": "many"}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"system": {"cubic_ratio": 0.3}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"train": {"batch_size": 0}})")), ConfigError);
  CHECK(config_from_json(c.to_json()).to_json() == c.to_json());
}

TEST_CASE("shipped presets parse") {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(NDS_CONFIG_DIR)) {
    CAPTURE(e.path().string());
    CHECK_NOTHROW(load_config(e.path()));
    ++n;
  }
  CHECK(n >= 3);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"gen-data", "--no-such-flag"}).code == kExitUsage);
  const auto h = run({"train", "--help"});
  CHECK(h.code == kExitOk);
  for (const char* flag : {"--epochs", "--batch-size", "--lr", "--reg", "--deterministic", "--template", "--mask"})
    CHECK(h.out.find(flag) != std::string::npos);

  const auto dir = fresh_dir("bad_config");
  write(dir / "c.json", R"({"train": {"epochs": 1, "colour": 2}})");
  const auto r = run({"--config", (dir / "c.json").string(), "verify", "--case", "1", "--n", "1"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("colour") != std::string::npos);
  write(dir / "broken.json", "{");
  CHECK(run({"--config", (dir / "broken.json").string(), "verify", "--case", "1", "--n", "1"}).code == kExitUsage);

  const auto missing = run({"eval", "--model", (dir / "nothing").string(), "--data", dir.string()});
  CHECK(missing.code == kExitFile);
  CHECK(missing.err.find("not found") != std::string::npos);
}

TEST_CASE("verify subcommand") {
  const auto r = run({"verify", "--case", "1", "--n", "5"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("PASS sdof displacement") != std::string::npos);
}

TEST_CASE("workflow") {
  const auto dir = fresh_dir("workflow");
  const auto data = (dir / "data").string();
  const auto g = run({"gen-data", "--case", "1", "--n-train", "64", "--n-val", "16", "--n-test", "8", "--seed", "7",
                      "--out", data, "--export-sample", "2"});
  REQUIRE(g.code == kExitOk);
  CHECK(fs::exists(dir / "data" / "sample_2.csv"));

  SUBCASE("gen-data is bit-identical across runs") {
    const auto data2 = (dir / "data2").string();
    run({"gen-data", "--case", "1", "--n-train", "64", "--n-val", "16", "--n-test", "8", "--seed", "7", "--out", data2});
    for (const char* f : {"train.nds", "val.nds", "test.nds", "x_stats.nst", "y_stats.nst"})
      CHECK(slurp(dir / "data" / f) == slurp(dir / "data2" / f));
  }

  SUBCASE("zero epochs keep the initialization") {
    const auto a = (dir / "a").string(), b = (dir / "b").string();
    REQUIRE(run({"train", "--data", data, "--epochs", "0", "--seed", "4", "--out", a}).code == kExitOk);
    REQUIRE(run({"train", "--data", data, "--epochs", "0", "--seed", "4", "--out", b}).code == kExitOk);
    CHECK(slurp(a + ".nck") == slurp(b + ".nck"));
    REQUIRE(run({"train", "--data", data, "--epochs", "1", "--seed", "4", "--out", b}).code == kExitOk);
    CHECK(slurp(a + ".nck") != slurp(b + ".nck"));
  }

  SUBCASE("flags override the config file") {
    write(dir / "c.json", R"({"train": {"epochs": 2, "batch_size": 16}, "paths": {"data_dir": ")" + data + R"("}})");
    const auto m = (dir / "m").string();
    REQUIRE(run({"--config", (dir / "c.json").string(), "train", "--epochs", "3", "--out", m}).code == kExitOk);
    std::ifstream h(m + ".history.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(h, line)) ++rows;
    CHECK(rows == 4);
  }

  SUBCASE("dense to sparse to grown") {
    const auto fc = (dir / "fc").string(), sc = (dir / "sc").string(), grown = (dir / "grown").string();
    const auto mask = (dir / "mask.nmk").string();
    REQUIRE(run({"train", "--data", data, "--epochs", "3", "--batch-size", "16", "--out", fc}).code == kExitOk);
    const auto a = run({"analyze-sparsity", "--model", fc, "--report", (dir / "sp.json").string(), "--mask-out", mask});
    REQUIRE(a.code == kExitOk);
    CHECK(fs::exists(dir / "sp.json"));
    REQUIRE(run({"build-sparse", "--model", fc, "--mask", mask, "--n-l", "1", "--n-c", "4", "--out", sc}).code ==
            kExitOk);
    REQUIRE(run({"train", "--init", sc, "--data", data, "--epochs", "2", "--batch-size", "16", "--out", sc}).code ==
            kExitOk);
    const auto gr = run({"grow", "--model", sc, "--data", data, "--phase1", "1", "--phase2", "1", "--batch-size", "16",
                         "--n-c", "4", "--out", grown});
    REQUIRE(gr.code == kExitOk);
    CHECK(gr.out.find("n_l = 2") != std::string::npos);
    const auto e = run({"eval", "--model", grown, "--data", data, "--report", (dir / "eval.json").string(),
                        "--per-sample", (dir / "per.csv").string()});
    REQUIRE(e.code == kExitOk);
    CHECK(e.out.find("mean_rel_err_pct") != std::string::npos);
    const auto p = run({"predict", "--model", grown, "--data", data, "--index", "3", "--out", (dir / "p.csv").string()});
    REQUIRE(p.code == kExitOk);
    CHECK(slurp(dir / "p.csv").rfind("t,y_true,y_pred", 0) == 0);
  }

  SUBCASE("conv-dense replacement keeps the later FC layers") {
    const auto fc = (dir / "fc2").string(), cd = (dir / "cd").string();
    REQUIRE(run({"train", "--data", data, "--n-fc", "2", "--epochs", "1", "--precision", "double", "--out", fc}).code ==
            kExitOk);
    const auto r = run({"build-sparse", "--model", fc, "--template", "conv_dense", "--n-l", "1", "--n-c", "2", "--out", cd});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("transferred 2 parameter arrays") != std::string::npos);
    CHECK(run({"build-sparse", "--model", cd, "--template", "conv_dense", "--out", cd}).code == kExitUsage);
  }

  SUBCASE("shape mismatch") {
    const auto other = (dir / "other").string();
    run({"gen-data", "--case", "3", "--n-train", "8", "--n-val", "4", "--n-test", "4", "--out", other});
    const auto fc = (dir / "fc101").string();
    REQUIRE(run({"train", "--data", data, "--epochs", "1", "--out", fc}).code == kExitOk);
    const auto r = run({"eval", "--model", fc, "--data", other});
    CHECK(r.code == kExitShape);
  }
}
