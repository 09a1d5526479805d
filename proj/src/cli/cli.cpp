#include "nds/cli/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>

#include "nds/cli/config.hpp"
#include "nds/cli/verify.hpp"
#include "nds/common/parallel.hpp"
#include "nds/eval/eval.hpp"
#include "nds/nn/checkpoint.hpp"
#include "nds/nn/init.hpp"
#include "nds/sampling/io.hpp"
#include "nds/sparse/sparsify.hpp"

namespace nds::cli {

namespace fs = std::filesystem;

namespace {

class FileError : public Error {
 public:
  using Error::Error;
};

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw FileError("file not found: " + p.string());
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

fs::path description_path(const std::string& prefix) { return prefix + ".json"; }
fs::path checkpoint_path(const std::string& prefix) { return prefix + ".nck"; }

template <typename T>
void save_model(const std::string& prefix, const nn::Model<T>& m) {
  ensure_parent(checkpoint_path(prefix));
  nn::write_model_description(description_path(prefix), m);
  nn::write_checkpoint(checkpoint_path(prefix), m);
}

template <typename T>
nn::Model<T> open_model(const std::string& prefix) {
  require_file(description_path(prefix));
  require_file(checkpoint_path(prefix));
  return nn::load_model<T>(description_path(prefix), checkpoint_path(prefix));
}

struct DataFiles {
  sampling::Dataset train, val;
  sampling::NormStats xs, ys;
};

fs::path split_file(const fs::path& dir, sampling::Split s) { return dir / (sampling::to_string(s) + ".nds"); }

sampling::Dataset open_split(const fs::path& dir, sampling::Split s) {
  require_file(split_file(dir, s));
  return sampling::read_dataset(split_file(dir, s));
}

std::pair<sampling::NormStats, sampling::NormStats> open_stats(const fs::path& dir) {
  require_file(dir / "x_stats.nst");
  require_file(dir / "y_stats.nst");
  return {sampling::read_norm_stats(dir / "x_stats.nst"), sampling::read_norm_stats(dir / "y_stats.nst")};
}

template <typename T>
std::pair<train::TrainData<T>, train::TrainData<T>> normalized_data(const fs::path& dir) {
  const auto tr = open_split(dir, sampling::Split::train);
  const auto va = open_split(dir, sampling::Split::val);
  const auto [xs, ys] = open_stats(dir);
  if (xs.size() != tr.n_points() || ys.size() != tr.n_points())
    throw ShapeError("normalization statistics do not match the dataset width");
  return {train::make_train_data<T>(sampling::normalize(tr.X, xs), sampling::normalize(tr.Y, ys)),
          train::make_train_data<T>(sampling::normalize(va.X, xs), sampling::normalize(va.Y, ys))};
}

void check_width(const nn::ModelSpec& spec, std::size_t n) {
  if (spec.input.height != n || spec.input.channels != 1)
    throw ShapeError("model input width " + std::to_string(spec.input.height) + " does not match data width " +
                     std::to_string(n));
}

std::string first_fc_layer(const nn::ModelSpec& spec) {
  for (const auto& l : spec.layers)
    if (std::holds_alternative<nn::FcSpec>(l.kind)) return l.name;
  throw InvalidArgument("model has no fully connected layer");
}

std::shared_ptr<const nn::BitMask> open_mask(const std::string& path) {
  if (path.empty()) throw InvalidArgument("a mask file is required (--mask or paths.mask)");
  require_file(path);
  return std::make_shared<const nn::BitMask>(sparse::read_mask(path));
}

void print_history_tail(std::ostream& out, const train::History& h) {
  if (h.empty()) {
    out << "no epochs run\n";
    return;
  }
  const auto& r = h.back();
  out << "epoch " << r.epoch << " train_loss " << std::setprecision(8) << r.train_loss << " val_loss "
      << r.val_loss << "\n";
}

// Everything a subcommand may override. Options are bound to these values
// and applied on top of the config only when given on the command line.
struct Flags {
  std::string config;
  int threads = 0;
  int case_id = 1;
  std::size_t n_train = 0, n_val = 0, n_test = 0;
  std::string response;
  double cubic_ratio = 1.0;
  std::uint64_t seed = 0;
  std::string data_dir, model, out, history, mask, layer, report, per_sample, init, split = "test";
  std::string template_name, precision;
  std::size_t n_fc = 1, n_l = 1, n_c = 16;
  std::size_t epochs = 0, batch_size = 0, phase1 = 0, phase2 = 0, blocks = 1, index = 0;
  double lr = 0, reg = 0, ratio = 0.05;
  bool deterministic = false, raw_mask = false, no_val = false;
  std::optional<std::size_t> export_sample;
  std::size_t n_loads = 0;
  std::string verify_case = "all";
};

bool given(CLI::App* app, const std::string& name) {
  const auto* opt = app->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

RunConfig resolve(CLI::App* sub, const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (given(sub, "--case")) c.dataspace.case_id = f.case_id;
  if (given(sub, "--n-train")) c.dataspace.n_train = f.n_train;
  if (given(sub, "--n-val")) c.dataspace.n_val = f.n_val;
  if (given(sub, "--n-test")) c.dataspace.n_test = f.n_test;
  if (given(sub, "--response")) c.dataspace.response = f.response;
  if (given(sub, "--cubic-ratio")) c.cubic_ratio = f.cubic_ratio;
  if (given(sub, "--seed")) c.seed = f.seed;
  if (given(sub, "--data")) c.paths.data_dir = f.data_dir;
  if (given(sub, "--mask")) c.paths.mask = f.mask;
  if (given(sub, "--template")) c.model.template_name = f.template_name;
  if (given(sub, "--precision")) c.model.precision = f.precision;
  if (given(sub, "--n-fc")) c.model.n_fc = f.n_fc;
  if (given(sub, "--n-l")) c.model.n_l = f.n_l;
  if (given(sub, "--n-c")) c.model.n_c = f.n_c;
  if (given(sub, "--epochs")) c.train.epochs = f.epochs;
  if (given(sub, "--batch-size")) c.train.batch_size = f.batch_size;
  if (given(sub, "--lr")) c.train.learning_rate = f.lr;
  if (given(sub, "--reg")) c.train.reg_weight = f.reg;
  if (given(sub, "--phase1")) c.phase1_epochs = f.phase1;
  if (given(sub, "--phase2")) c.phase2_epochs = f.phase2;
  if (given(sub, "--deterministic")) c.train.deterministic = true;
  c.train.seed = c.seed;
  c.validate();
  return c;
}

std::string out_prefix(CLI::App* sub, const Flags& f, const RunConfig& c) {
  return given(sub, "--out") ? f.out : c.paths.model;
}

// ---- subcommands ---------------------------------------------------------

int cmd_gen_data(CLI::App* sub, const Flags& f, std::ostream& out) {
  const auto c = resolve(sub, f);
  const auto space = c.make_dataspace();
  const fs::path dir = given(sub, "--out") ? fs::path(f.out) : fs::path(c.paths.data_dir);
  fs::create_directories(dir);
  sampling::Dataset train_set;
  for (auto s : {sampling::Split::train, sampling::Split::val, sampling::Split::test}) {
    const auto d = sampling::generate_dataset(space, s, c.seed);
    sampling::write_dataset(split_file(dir, s), d);
    out << sampling::to_string(s) << ": " << d.n_samples() << " x " << d.n_points() << " -> "
        << split_file(dir, s).string() << "\n";
    if (s == sampling::Split::train) train_set = d;
  }
  const auto [xs, ys] = sampling::compute_norm_stats(train_set);
  sampling::write_norm_stats(dir / "x_stats.nst", xs);
  sampling::write_norm_stats(dir / "y_stats.nst", ys);
  if (f.export_sample) {
    const std::size_t k = *f.export_sample;
    if (k >= space.sizes.test) throw InvalidArgument("--export-sample index beyond the test split");
    const auto load = sampling::sample_load(space, sampling::Split::test, c.seed, k, space.sizes.test);
    const auto p = dir / ("sample_" + std::to_string(k) + ".csv");
    sampling::write_sample_csv(p, space, load);
    out << "sample " << k << " -> " << p.string() << "\n";
  }
  return kExitOk;
}

template <typename T>
int train_impl(CLI::App* sub, const Flags& f, const RunConfig& c, std::ostream& out) {
  const fs::path dir = c.paths.data_dir;
  auto [td, vd] = normalized_data<T>(dir);
  const std::size_t n = td.x.height;
  std::optional<nn::Model<T>> model;
  if (given(sub, "--init")) {
    model.emplace(open_model<T>(f.init));
  } else {
    nn::ModelSpec spec;
    if (c.model.template_name == "dense") {
      spec = sparse::build_dense_model(n, c.model.n_fc);
    } else if (c.model.template_name == "conv_dense") {
      spec = sparse::build_conv_dense_template(n, c.model.n_l, c.model.n_fc, c.template_options());
    } else {
      spec = sparse::build_sparse_template(n, c.model.n_l, open_mask(c.paths.mask), c.template_options());
    }
    model.emplace(spec);
    nn::init_params(*model, c.seed);
  }
  check_width(model->spec(), n);
  const auto h = train::train(*model, td, f.no_val ? nullptr : &vd, c.train);
  const auto prefix = out_prefix(sub, f, c);
  save_model(prefix, *model);
  const fs::path hist = given(sub, "--history") ? fs::path(f.history) : fs::path(prefix + ".history.csv");
  ensure_parent(hist);
  train::write_history_csv(hist, h);
  print_history_tail(out, h);
  out << "model -> " << checkpoint_path(prefix).string() << "\n";
  return kExitOk;
}

int cmd_train(CLI::App* sub, const Flags& f, std::ostream& out) {
  const auto c = resolve(sub, f);
  return c.model.precision == "double" ? train_impl<double>(sub, f, c, out) : train_impl<float>(sub, f, c, out);
}

int cmd_analyze(CLI::App* sub, const Flags& f, std::ostream& out) {
  const auto c = resolve(sub, f);
  const std::string prefix = given(sub, "--model") ? f.model : c.paths.model;
  auto m = open_model<double>(prefix);
  const std::string layer = given(sub, "--layer") ? f.layer : first_fc_layer(m.spec());
  const auto [mask, rep] = sparse::sparsity_mask(sparse::weight_matrix(m.params(), layer), f.ratio);
  const auto fit = sparse::fit_pattern(rep);
  auto j = rep.to_json();
  j["layer"] = layer;
  j["pattern"] = sparse::to_string(fit.kind);
  j["fitted_band_width"] = fit.band_width;
  const fs::path report = given(sub, "--report") ? fs::path(f.report) : fs::path(c.paths.reports) / "sparsity.json";
  ensure_parent(report);
  std::ofstream(report) << j.dump(2) << "\n";

  nn::BitMask chosen = mask;
  if (!f.raw_mask && fit.kind != sparse::PatternKind::none) {
    if (rep.rows != rep.cols) throw ShapeError("structured patterns need a square weight matrix");
    chosen = sparse::structured_mask(fit.kind, rep.rows, fit.band_width);
  }
  const fs::path mask_path = given(sub, "--mask-out") ? fs::path(f.out) : fs::path(c.paths.reports) / "mask.nmk";
  ensure_parent(mask_path);
  sparse::write_mask(mask_path, chosen);
  out << "layer " << layer << ": " << rep.nnz << " of " << rep.rows * rep.cols << " weights survive, "
      << std::setprecision(4) << 100.0 * rep.lower_fraction << "% on or below the diagonal, pattern "
      << sparse::to_string(fit.kind);
  if (fit.kind == sparse::PatternKind::banded_lower) out << " (w_b = " << fit.band_width << ")";
  out << "\nmask (" << chosen.count() << " entries) -> " << mask_path.string() << "\n";
  return kExitOk;
}

int cmd_build_sparse(CLI::App* sub, const Flags& f, std::ostream& out) {
  const auto c = resolve(sub, f);
  const std::string dense_prefix = given(sub, "--model") ? f.model : c.paths.model;
  const auto dense = open_model<double>(dense_prefix);
  const std::size_t n = dense.spec().input.height;
  std::optional<nn::Model<double>> result;
  if (c.model.template_name == "conv_dense") {
    // The leading FC layer is replaced by the CONV stack; later FC layers keep their values.
    std::size_t n_fc = 0;
    for (const auto& l : dense.spec().layers) n_fc += std::holds_alternative<nn::FcSpec>(l.kind);
    if (n_fc < 2) throw InvalidArgument("conv_dense replacement needs a dense model with at least two FC layers");
    result.emplace(sparse::build_conv_dense_template(n, c.model.n_l, n_fc - 1, c.template_options()));
    nn::init_params(*result, c.seed);
    const auto moved = nn::transfer_params(dense.params(), result->params());
    out << "transferred " << moved << " parameter arrays\n";
  } else {
    const auto mask = open_mask(c.paths.mask);
    const std::string layer = given(sub, "--layer") ? f.layer : first_fc_layer(dense.spec());
    const auto sc = sparse::build_sc_from_fc(dense.params(), layer, mask);
    result = sparse::make_sparse_model<double>(sparse::build_sparse_template(n, c.model.n_l, mask, c.template_options()),
                                               sc, c.seed);
  }
  const auto pc = nn::param_count(result->spec());
  const auto prefix = out_prefix(sub, f, c);
  save_model(prefix, *result);
  out << "template with " << pc.total_trainable << " trainable parameters -> " << checkpoint_path(prefix).string()
      << "\n";
  return kExitOk;
}

template <typename T>
int grow_impl(CLI::App* sub, const Flags& f, const RunConfig& c, std::ostream& out) {
  auto [td, vd] = normalized_data<T>(c.paths.data_dir);
  const std::string in_prefix = given(sub, "--model") ? f.model : c.paths.model;
  auto model = open_model<T>(in_prefix);
  check_width(model.spec(), td.x.height);
  train::History all;
  for (std::size_t b = 0; b < f.blocks; ++b) {
    auto g = sparse::insert_bn_conv(model, c.seed + b);
    const auto target = sparse::count_bn_layers(g.model.spec());
    const auto plan = sparse::default_growth_plan(target, c.train.epochs, c.model.n_c);
    const std::size_t p1 = c.phase1_epochs.value_or(plan.phase1_epochs);
    const std::size_t p2 = c.phase2_epochs.value_or(plan.phase2_epochs);
    const auto h = sparse::two_phase_train(g.model, g.new_layers, td, f.no_val ? nullptr : &vd, c.train, p1, p2);
    all.insert(all.end(), h.begin(), h.end());
    model = std::move(g.model);
    out << "n_l = " << target << ": ";
    print_history_tail(out, h);
  }
  for (std::size_t i = 0; i < all.size(); ++i) all[i].epoch = i + 1;
  const auto prefix = out_prefix(sub, f, c);
  save_model(prefix, model);
  const fs::path hist = given(sub, "--history") ? fs::path(f.history) : fs::path(prefix + ".history.csv");
  ensure_parent(hist);
  train::write_history_csv(hist, all);
  out << "model -> " << checkpoint_path(prefix).string() << "\n";
  return kExitOk;
}

int cmd_grow(CLI::App* sub, const Flags& f, std::ostream& out) {
  const auto c = resolve(sub, f);
  return c.model.precision == "double" ? grow_impl<double>(sub, f, c, out) : grow_impl<float>(sub, f, c, out);
}

int cmd_eval(CLI::App* sub, const Flags& f, std::ostream& out) {
  const auto c = resolve(sub, f);
  const std::string prefix = given(sub, "--model") ? f.model : c.paths.model;
  auto model = open_model<double>(prefix);
  const auto data = open_split(c.paths.data_dir, sampling::split_from_string(f.split));
  const auto [xs, ys] = open_stats(c.paths.data_dir);
  check_width(model.spec(), data.n_points());
  auto rep = eval::evaluate(model, data, xs, ys);
  rep.case_name = "case" + std::to_string(static_cast<int>(data.meta.case_id));
  rep.model_name = fs::path(prefix).filename().string();
  const fs::path report = given(sub, "--report") ? fs::path(f.report) : fs::path(c.paths.reports) / "eval.json";
  ensure_parent(report);
  eval::write_report_json(report, rep);
  if (given(sub, "--per-sample")) {
    ensure_parent(f.per_sample);
    eval::write_per_sample_csv(f.per_sample, rep);
  }
  out << rep.to_json().dump(2) << "\n";
  return kExitOk;
}

int cmd_predict(CLI::App* sub, const Flags& f, std::ostream& out) {
  const auto c = resolve(sub, f);
  const std::string prefix = given(sub, "--model") ? f.model : c.paths.model;
  auto model = open_model<double>(prefix);
  const auto data = open_split(c.paths.data_dir, sampling::split_from_string(f.split));
  const auto [xs, ys] = open_stats(c.paths.data_dir);
  check_width(model.spec(), data.n_points());
  if (f.index >= data.n_samples()) throw InvalidArgument("--index beyond the split size");
  const std::size_t n = data.n_points();
  MatrixD x(1, n);
  for (std::size_t j = 0; j < n; ++j) x(0, j) = data.X(f.index, j);
  const auto y = eval::predict(model, x, xs, ys);
  const auto space = c.make_dataspace();
  std::vector<double> t(n), truth(n), pred(n);
  for (std::size_t j = 0; j < n; ++j) {
    t[j] = space.grid.time(j);
    truth[j] = data.Y(f.index, j);
    pred[j] = y(0, j);
  }
  const fs::path path = given(sub, "--out") ? fs::path(f.out)
                                            : fs::path(c.paths.reports) / ("prediction_" + std::to_string(f.index) + ".csv");
  ensure_parent(path);
  eval::write_prediction_csv(path, t, truth, pred);
  out << "relative error " << std::setprecision(4) << eval::relative_error(truth, pred) << "% -> " << path.string()
      << "\n";
  return kExitOk;
}

int cmd_verify(CLI::App* sub, const Flags& f, std::ostream& out) {
  const auto c = resolve(sub, f);
  std::vector<OracleCheck> checks;
  const bool all = f.verify_case == "all";
  const auto n = [&](std::size_t dflt) { return f.n_loads ? f.n_loads : dflt; };
  if (all || f.verify_case == "1") for (auto& k : check_sdof_oracle(n(100), c.seed)) checks.push_back(k);
  if (all || f.verify_case == "6") for (auto& k : check_mdof_oracle(n(50), c.seed)) checks.push_back(k);
  if (all || f.verify_case == "5") for (auto& k : check_nonlinear(n(10), c.seed)) checks.push_back(k);
  if (checks.empty()) throw InvalidArgument("verify --case must be 1, 5, 6 or all");
  bool ok = true;
  for (const auto& k : checks) {
    out << (k.pass() ? "PASS " : "FAIL ") << k.name << ": " << std::setprecision(6) << k.value << " " << k.unit
        << " (limit " << k.tolerance << ")\n";
    ok = ok && k.pass();
  }
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Surrogate models of structural dynamics: data generation, training, sparsification and growth"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON run config; flags override its values")->check(CLI::ExistingFile);
  app.add_option("--threads", f.threads, "Worker thread cap (0 = runtime default)")
      ->envname("NDS_THREADS")
      ->check(CLI::NonNegativeNumber);

  const auto seed = [&](CLI::App* s) { s->add_option("--seed", f.seed, "Master seed"); };
  const auto data = [&](CLI::App* s) { s->add_option("--data", f.data_dir, "Dataset directory"); };
  const auto model = [&](CLI::App* s) { s->add_option("--model", f.model, "Model prefix (<prefix>.json + <prefix>.nck)"); };
  const auto out_opt = [&](CLI::App* s, const char* what) { s->add_option("--out", f.out, what); };
  const auto arch = [&](CLI::App* s) {
    s->add_option("--template", f.template_name, "dense | conv_dense | sparse");
    s->add_option("--n-fc", f.n_fc, "Number of FC layers (dense) or retained FC layers (conv_dense)");
    s->add_option("--n-l", f.n_l, "Number of BN layers in a CONV stack");
    s->add_option("--n-c", f.n_c, "CONV channels");
    s->add_option("--mask", f.mask, "Mask file for the SC layer");
  };
  const auto training = [&](CLI::App* s) {
    s->add_option("--epochs", f.epochs, "Epochs");
    s->add_option("--batch-size", f.batch_size, "Mini-batch size");
    s->add_option("--lr", f.lr, "Adam step size");
    s->add_option("--reg", f.reg, "L2 penalty weight");
    s->add_option("--precision", f.precision, "float | double");
    s->add_option("--history", f.history, "History CSV path");
    s->add_flag("--deterministic", f.deterministic, "Fixed-order reductions for bit-identical reruns");
    s->add_flag("--no-val", f.no_val, "Skip the validation loss");
  };

  auto* gen = app.add_subcommand("gen-data", "Generate train/val/test datasets and normalization statistics");
  gen->add_option("--case", f.case_id, "Case 1..7")->check(CLI::Range(1, 7));
  gen->add_option("--n-train", f.n_train, "Training samples");
  gen->add_option("--n-val", f.n_val, "Validation samples");
  gen->add_option("--n-test", f.n_test, "Test samples");
  gen->add_option("--response", f.response, "displacement | acceleration");
  gen->add_option("--cubic-ratio", f.cubic_ratio, "Cubic coefficient as a fraction of k");
  gen->add_option("--export-sample", f.export_sample, "Also export test sample K as CSV (t, p, u, a)");
  seed(gen);
  out_opt(gen, "Output directory");

  auto* tr = app.add_subcommand("train", "Train a model and write its checkpoint and history");
  data(tr);
  arch(tr);
  training(tr);
  seed(tr);
  tr->add_option("--init", f.init, "Start from an existing model prefix instead of a template");
  out_opt(tr, "Output model prefix");

  auto* an = app.add_subcommand("analyze-sparsity", "Magnitude-threshold analysis of an FC weight matrix");
  model(an);
  an->add_option("--layer", f.layer, "FC layer name (default: first FC layer)");
  an->add_option("--ratio", f.ratio, "Relative magnitude threshold")->check(CLI::Range(0.0, 1.0));
  an->add_option("--report", f.report, "Report JSON path");
  an->add_option("--mask-out", f.out, "Mask file path");
  an->add_flag("--raw-mask", f.raw_mask, "Write the thresholded mask instead of the fitted pattern");

  auto* bs = app.add_subcommand("build-sparse", "Assemble a sparse or conv-dense template from a trained dense model");
  model(bs);
  arch(bs);
  bs->add_option("--layer", f.layer, "FC layer to transfer (default: first FC layer)");
  seed(bs);
  out_opt(bs, "Output model prefix");

  auto* gr = app.add_subcommand("grow", "Insert BN-CONV blocks and run two-phase training");
  model(gr);
  data(gr);
  training(gr);
  seed(gr);
  gr->add_option("--blocks", f.blocks, "Blocks to insert, one at a time")->check(CLI::PositiveNumber);
  gr->add_option("--phase1", f.phase1, "Epochs with only the new layers trainable");
  gr->add_option("--phase2", f.phase2, "Epochs with everything trainable");
  gr->add_option("--n-c", f.n_c, "CONV channels");
  out_opt(gr, "Output model prefix");

  auto* ev = app.add_subcommand("eval", "Evaluate a model on a dataset split");
  model(ev);
  data(ev);
  ev->add_option("--split", f.split, "train | val | test");
  ev->add_option("--report", f.report, "Report JSON path");
  ev->add_option("--per-sample", f.per_sample, "Per-sample relative error CSV path");

  auto* pr = app.add_subcommand("predict", "Predict one sample and export the trace as CSV");
  model(pr);
  data(pr);
  pr->add_option("--split", f.split, "train | val | test");
  pr->add_option("--index", f.index, "Sample index");
  out_opt(pr, "CSV path");

  auto* ve = app.add_subcommand("verify", "Cross-check the analytical solutions against Newmark integration");
  ve->add_option("--case", f.verify_case, "1, 5, 6 or all");
  ve->add_option("--n", f.n_loads, "Number of loads");
  seed(ve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (f.threads > 0) set_num_threads(f.threads);
    CLI::App* sub = app.get_subcommands().front();
    if (sub == gen) return cmd_gen_data(sub, f, out);
    if (sub == tr) return cmd_train(sub, f, out);
    if (sub == an) return cmd_analyze(sub, f, out);
    if (sub == bs) return cmd_build_sparse(sub, f, out);
    if (sub == gr) return cmd_grow(sub, f, out);
    if (sub == ev) return cmd_eval(sub, f, out);
    if (sub == pr) return cmd_predict(sub, f, out);
    return cmd_verify(sub, f, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FileError& e) {
    err << "file error: " << e.what() << "\n";
    return kExitFile;
  } catch (const FormatError& e) {
    err << "file format error: " << e.what() << "\n";
    return kExitFile;
  } catch (const ShapeError& e) {
    err << "shape mismatch: " << e.what() << "\n";
    return kExitShape;
  } catch (const train::NonFiniteLossError& e) {
    err << "training diverged: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ConvergenceError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace nds::cli
