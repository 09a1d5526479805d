#include "nds/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace nds::cli {

namespace {

using nlohmann::json;

// Wraps one JSON object and remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T v{};
    get(key, v);
    out = v;
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Section(j_.at(key), path_ + "." + key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError("unknown config key: " + path_ + "." + k);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

sampling::Range range_of(const std::vector<double>& v, const char* what) {
  if (v.size() != 2 || !(v[0] <= v[1])) throw ConfigError(std::string("dataspace.") + what + ": expected [lo, hi]");
  return {v[0], v[1]};
}

}  // namespace

RunConfig config_from_json(const json& j, RunConfig c) {
  Section root(j, "config");
  root.get("seed", c.seed);
  if (auto s = root.child("dataspace")) {
    auto& d = c.dataspace;
    s->get("case", d.case_id);
    s->get("response", d.response);
    s->get("response_dof", d.response_dof);
    s->get("subrange", d.subrange);
    s->get("n_train", d.n_train);
    s->get("n_val", d.n_val);
    s->get("n_test", d.n_test);
    s->get("n_terms", d.n_terms);
    s->get("amplitude", d.amplitude);
    s->get("frequency", d.frequency);
    s->get("phase", d.phase);
    s->get("duration", d.duration);
    s->get("obs_step", d.obs_step);
    s->get("fine_step", d.fine_step);
    s->finish();
  }
  if (auto s = root.child("system")) {
    s->get("cubic_ratio", c.cubic_ratio);
    s->finish();
  }
  if (auto s = root.child("model")) {
    auto& m = c.model;
    s->get("template", m.template_name);
    s->get("n_fc", m.n_fc);
    s->get("n_l", m.n_l);
    s->get("n_c", m.n_c);
    s->get("bn_mode", m.bn_mode);
    s->get("bn_eps", m.bn_eps);
    s->get("precision", m.precision);
    s->finish();
  }
  if (auto s = root.child("train")) {
    auto& t = c.train;
    s->get("reg_weight", t.reg_weight);
    s->get("learning_rate", t.learning_rate);
    s->get("beta1", t.beta1);
    s->get("beta2", t.beta2);
    s->get("epsilon", t.epsilon);
    s->get("batch_size", t.batch_size);
    s->get("epochs", t.epochs);
    s->get("deterministic", t.deterministic);
    s->get("frozen", t.frozen_params);
    s->get("phase1_epochs", c.phase1_epochs);
    s->get("phase2_epochs", c.phase2_epochs);
    s->finish();
  }
  if (auto s = root.child("paths")) {
    s->get("data_dir", c.paths.data_dir);
    s->get("model", c.paths.model);
    s->get("reports", c.paths.reports);
    s->get("mask", c.paths.mask);
    s->finish();
  }
  root.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void RunConfig::validate() const {
  if (dataspace.case_id < 1 || dataspace.case_id > 7) throw ConfigError("dataspace.case must be in 1..7");
  static const double allowed[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  bool ok = false;
  for (double a : allowed) ok = ok || cubic_ratio == a;
  if (!ok) throw ConfigError("system.cubic_ratio must be one of 0, 0.25, 0.5, 0.75, 1");
  if (model.template_name != "dense" && model.template_name != "conv_dense" && model.template_name != "sparse")
    throw ConfigError("model.template must be dense, conv_dense or sparse");
  if (model.precision != "float" && model.precision != "double")
    throw ConfigError("model.precision must be float or double");
  if (model.bn_mode != "per_height" && model.bn_mode != "per_element")
    throw ConfigError("model.bn_mode must be per_height or per_element");
  if (model.n_fc == 0) throw ConfigError("model.n_fc must be positive");
  if (model.n_c == 0) throw ConfigError("model.n_c must be positive");
  try {
    train.validate();
    (void)make_dataspace();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

sampling::Dataspace RunConfig::make_dataspace() const {
  const auto id = static_cast<sampling::CaseId>(dataspace.case_id);
  sampling::ResponseKind kind;
  try {
    kind = sampling::response_from_string(dataspace.response);
  } catch (const Error& e) {
    throw ConfigError(std::string("dataspace.response: ") + e.what());
  }
  sampling::Dataspace s;
  if (dataspace.subrange != 0) {
    if (id != sampling::CaseId::case6) throw ConfigError("dataspace.subrange applies to case 6 only");
    s = sampling::case6_subrange(dataspace.subrange - 1, kind);
  } else {
    s = sampling::make_dataspace(id, kind, cubic_ratio);
  }
  s.response_dof = dataspace.response_dof;
  if (dataspace.n_train) s.sizes.train = *dataspace.n_train;
  if (dataspace.n_val) s.sizes.val = *dataspace.n_val;
  if (dataspace.n_test) s.sizes.test = *dataspace.n_test;
  if (dataspace.n_terms) s.n_terms = *dataspace.n_terms;
  if (dataspace.amplitude) s.amplitude = range_of(*dataspace.amplitude, "amplitude");
  if (dataspace.frequency) s.frequency = range_of(*dataspace.frequency, "frequency");
  if (dataspace.phase) s.phase = range_of(*dataspace.phase, "phase");
  if (dataspace.duration) s.grid.duration = *dataspace.duration;
  if (dataspace.obs_step) s.grid.obs_step = *dataspace.obs_step;
  if (dataspace.fine_step) s.grid.fine_step = *dataspace.fine_step;
  s.validate();
  return s;
}

sparse::TemplateOptions RunConfig::template_options() const {
  sparse::TemplateOptions o;
  o.n_c = model.n_c;
  o.bn_mode = model.bn_mode == "per_element" ? nn::BnParamMode::per_element : nn::BnParamMode::per_height;
  o.bn_eps = model.bn_eps;
  return o;
}

nlohmann::json RunConfig::to_json() const {
  json ds = {{"case", dataspace.case_id},
             {"response", dataspace.response},
             {"response_dof", dataspace.response_dof},
             {"subrange", dataspace.subrange}};
  const auto opt = [&](const char* k, const auto& v) {
    if (v) ds[k] = *v;
  };
  opt("n_train", dataspace.n_train);
  opt("n_val", dataspace.n_val);
  opt("n_test", dataspace.n_test);
  opt("n_terms", dataspace.n_terms);
  opt("amplitude", dataspace.amplitude);
  opt("frequency", dataspace.frequency);
  opt("phase", dataspace.phase);
  opt("duration", dataspace.duration);
  opt("obs_step", dataspace.obs_step);
  opt("fine_step", dataspace.fine_step);
  json tr = {{"reg_weight", train.reg_weight},
             {"learning_rate", train.learning_rate},
             {"beta1", train.beta1},
             {"beta2", train.beta2},
             {"epsilon", train.epsilon},
             {"batch_size", train.batch_size},
             {"epochs", train.epochs},
             {"deterministic", train.deterministic},
             {"frozen", train.frozen_params}};
  if (phase1_epochs) tr["phase1_epochs"] = *phase1_epochs;
  if (phase2_epochs) tr["phase2_epochs"] = *phase2_epochs;
  return {{"seed", seed},
          {"dataspace", ds},
          {"system", {{"cubic_ratio", cubic_ratio}}},
          {"model",
           {{"template", model.template_name},
            {"n_fc", model.n_fc},
            {"n_l", model.n_l},
            {"n_c", model.n_c},
            {"bn_mode", model.bn_mode},
            {"bn_eps", model.bn_eps},
            {"precision", model.precision}}},
          {"train", tr},
          {"paths",
           {{"data_dir", paths.data_dir},
            {"model", paths.model},
            {"reports", paths.reports},
            {"mask", paths.mask}}}};
}

}  // namespace nds::cli
