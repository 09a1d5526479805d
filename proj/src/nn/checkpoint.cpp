#include "nds/nn/checkpoint.hpp"

#include <fstream>
#include <limits>

#include "nds/common/binary_io.hpp"

namespace nds::nn {

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

template <typename T>
void write_checkpoint(const std::filesystem::path& path, const Model<T>& model) {
  binary::Writer w(path);
  w.magic("NCK1");
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.spec().layers.size()));
  for (const auto& p : model.params()) {
    if (p.name.size() > std::numeric_limits<std::uint16_t>::max())
      throw InvalidArgument("parameter name too long: " + p.name);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(p.name.size()));
    w.bytes({reinterpret_cast<const std::uint8_t*>(p.name.data()), p.name.size()});
    w.put<std::uint8_t>(p.trainable ? 1 : 0);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(p.dims.size()));
    for (auto d : p.dims) w.put<std::uint64_t>(d);
    std::vector<double> values(p.value.begin(), p.value.end());
    w.put_span<double>(values);
  }
  w.finish();
}

ParamStore<double> read_checkpoint(const std::filesystem::path& path) {
  binary::Reader r(path);
  r.expect_magic("NCK1");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw VersionError("unsupported checkpoint version " + std::to_string(version));
  (void)r.get<std::uint32_t>();
  ParamStore<double> store;
  while (!r.at_end()) {
    Param<double> p;
    const auto len = r.get<std::uint16_t>();
    const auto name = r.get_bytes(len);
    p.name.assign(name.begin(), name.end());
    p.trainable = r.get<std::uint8_t>() != 0;
    const auto rank = r.get<std::uint8_t>();
    std::size_t n = 1;
    for (std::uint8_t k = 0; k < rank; ++k) {
      p.dims.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
      if (p.dims.back() != 0 && n > std::numeric_limits<std::size_t>::max() / p.dims.back())
        throw FormatError("parameter dims overflow: " + p.name);
      n *= p.dims.back();
    }
    p.value = r.get_vector<double>(n);
    store.add(std::move(p));
  }
  return store;
}

template <typename T>
void write_model_description(const std::filesystem::path& path, const Model<T>& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << describe(model).dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

ModelDescription read_model_description(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model description is not valid JSON: " + std::string(e.what()));
  }
  ModelDescription d;
  try {
    d.spec = model_spec_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed model description: " + std::string(e.what()));
  }
  bool any_bn = false;
  d.bn_finalized = true;
  for (const auto& rec : j)
    if (rec.at("type") == "bn") {
      any_bn = true;
      d.bn_finalized = d.bn_finalized && rec.value("population_stats", "pending") == "finalized";
    }
  if (!any_bn) d.bn_finalized = false;
  return d;
}

template <typename T>
Model<T> load_model(const std::filesystem::path& description, const std::filesystem::path& checkpoint) {
  const auto desc = read_model_description(description);
  Model<T> model(desc.spec);
  const auto stored = read_checkpoint(checkpoint);
  for (const auto& p : model.params()) {
    if (!stored.contains(p.name)) throw FormatError("checkpoint lacks parameter " + p.name);
    if (stored.at(p.name).dims != p.dims)
      throw ShapeError("checkpoint parameter " + p.name + " has mismatched dims");
  }
  transfer_params(stored, model.params());
  model.apply_masks();
  model.set_bn_finalized(desc.bn_finalized);
  return model;
}

template void write_checkpoint(const std::filesystem::path&, const Model<float>&);
template void write_checkpoint(const std::filesystem::path&, const Model<double>&);
template void write_model_description(const std::filesystem::path&, const Model<float>&);
template void write_model_description(const std::filesystem::path&, const Model<double>&);
template Model<float> load_model(const std::filesystem::path&, const std::filesystem::path&);
template Model<double> load_model(const std::filesystem::path&, const std::filesystem::path&);

}  // namespace nds::nn
