#include "nds/nn/spec.hpp"

#include "nds/common/error.hpp"

namespace nds::nn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

const char* activation_name(Activation a) { return a == Activation::relu ? "relu" : "linear"; }

Activation activation_from(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "linear") return Activation::linear;
  throw FormatError("unknown activation: " + s);
}

}  // namespace

const char* kind_name(const LayerKind& kind) {
  return std::visit(overloaded{[](const FcSpec&) { return "fc"; },
                               [](const ScSpec&) { return "sc"; },
                               [](const ConvSpec&) { return "conv1d"; },
                               [](const BnSpec&) { return "bn"; }},
                    kind);
}

std::size_t conv_pad_before(const ConvSpec& conv) { return (conv.filter_size - 1) / 2; }

std::vector<Shape> ModelSpec::infer_shapes() const {
  if (input.height == 0 || input.channels == 0) throw ShapeError("model input shape is empty");
  std::vector<Shape> shapes;
  Shape cur = input;
  for (const auto& layer : layers) {
    const std::string where = "layer '" + layer.name + "': ";
    cur = std::visit(
        overloaded{
            [&](const FcSpec& fc) {
              if (cur.channels != 1 || cur.height != fc.in)
                throw ShapeError(where + "FC input must be a vector of length " +
                                 std::to_string(fc.in));
              if (fc.out == 0) throw ShapeError(where + "FC output width is zero");
              return Shape{fc.out, 1};
            },
            [&](const ScSpec& sc) {
              if (!sc.mask) throw ShapeError(where + "SC layer has no mask");
              if (cur.channels != 1 || cur.height != sc.mask->cols())
                throw ShapeError(where + "SC input does not match mask columns");
              return Shape{sc.mask->rows(), 1};
            },
            [&](const ConvSpec& conv) {
              if (conv.filter_size == 0) throw ShapeError(where + "filter size must be positive");
              if (conv.stride != 1) throw ShapeError(where + "only stride 1 is supported");
              if (conv.in_channels != cur.channels)
                throw ShapeError(where + "conv in_channels does not match input");
              if (conv.out_channels == 0) throw ShapeError(where + "conv has no filters");
              return Shape{cur.height, conv.out_channels};
            },
            [&](const BnSpec& bn) {
              if (!(bn.eps > 0.0)) throw ShapeError(where + "BN epsilon must be positive");
              return cur;
            }},
        layer.kind);
    shapes.push_back(cur);
  }
  return shapes;
}

Shape ModelSpec::output_shape() const {
  const auto s = infer_shapes();
  return s.empty() ? input : s.back();
}

std::size_t ModelSpec::index_of(const std::string& layer_name) const {
  for (std::size_t i = 0; i < layers.size(); ++i)
    if (layers[i].name == layer_name) return i;
  throw InvalidArgument("no layer named " + layer_name);
}

ParamCount param_count(const ModelSpec& spec) {
  const auto shapes = spec.infer_shapes();
  ParamCount out;
  Shape in = spec.input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& layer = spec.layers[i];
    LayerCount c{layer.name, kind_name(layer.kind), 0, 0};
    std::visit(overloaded{[&](const FcSpec& fc) { c.trainable = fc.in * fc.out + fc.out; },
                          [&](const ScSpec& sc) { c.trainable = sc.mask->count() + sc.mask->rows(); },
                          [&](const ConvSpec& conv) {
                            c.trainable = conv.filter_size * conv.in_channels * conv.out_channels +
                                          conv.out_channels;
                          },
                          [&](const BnSpec& bn) {
                            const std::size_t group = bn.mode == BnParamMode::per_height
                                                          ? in.height
                                                          : in.height * in.channels;
                            c.trainable = 2 * group;
                          }},
               layer.kind);
    c.listed = std::holds_alternative<BnSpec>(layer.kind) ? 2 * c.trainable : c.trainable;
    out.total_trainable += c.trainable;
    out.total_listed += c.listed;
    out.layers.push_back(std::move(c));
    in = shapes[i];
  }
  return out;
}

nlohmann::json to_json(const ModelSpec& spec) {
  const auto shapes = spec.infer_shapes();
  nlohmann::json layers = nlohmann::json::array();
  Shape in = spec.input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& layer = spec.layers[i];
    nlohmann::json j{{"name", layer.name},
                     {"type", kind_name(layer.kind)},
                     {"in_height", in.height},
                     {"in_channels", in.channels}};
    std::visit(overloaded{[&](const FcSpec& fc) {
                            j["in"] = fc.in;
                            j["out"] = fc.out;
                            j["activation"] = activation_name(fc.activation);
                          },
                          [&](const ScSpec& sc) {
                            j["rows"] = sc.mask->rows();
                            j["cols"] = sc.mask->cols();
                            j["activation"] = activation_name(sc.activation);
                            j["mask_hex"] = sc.mask->to_hex();
                          },
                          [&](const ConvSpec& conv) {
                            j["filter_size"] = conv.filter_size;
                            j["stride"] = conv.stride;
                            j["in_channels"] = conv.in_channels;
                            j["out_channels"] = conv.out_channels;
                            j["activation"] = activation_name(conv.activation);
                            j["padding"] = "same";
                          },
                          [&](const BnSpec& bn) {
                            j["param_mode"] =
                                bn.mode == BnParamMode::per_height ? "per_height" : "per_element";
                            j["eps"] = bn.eps;
                          }},
               layer.kind);
    layers.push_back(std::move(j));
    in = shapes[i];
  }
  return layers;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw FormatError("model description must be a non-empty list");
  ModelSpec spec;
  spec.input = {j.front().at("in_height").get<std::size_t>(),
                j.front().at("in_channels").get<std::size_t>()};
  for (const auto& rec : j) {
    LayerSpec layer;
    layer.name = rec.at("name").get<std::string>();
    const auto type = rec.at("type").get<std::string>();
    if (type == "fc") {
      layer.kind = FcSpec{rec.at("in").get<std::size_t>(), rec.at("out").get<std::size_t>(),
                          activation_from(rec.at("activation").get<std::string>())};
    } else if (type == "sc") {
      auto mask = std::make_shared<BitMask>(
          BitMask::from_hex(rec.at("rows").get<std::size_t>(), rec.at("cols").get<std::size_t>(),
                            rec.at("mask_hex").get<std::string>()));
      layer.kind = ScSpec{std::move(mask), activation_from(rec.at("activation").get<std::string>())};
    } else if (type == "conv1d") {
      if (rec.value("padding", std::string("same")) != "same")
        throw FormatError("only same padding is supported");
      layer.kind = ConvSpec{rec.at("filter_size").get<std::size_t>(),
                            rec.value("stride", std::size_t{1}),
                            rec.at("in_channels").get<std::size_t>(),
                            rec.at("out_channels").get<std::size_t>(),
                            activation_from(rec.at("activation").get<std::string>())};
    } else if (type == "bn") {
      const auto mode = rec.value("param_mode", std::string("per_height"));
      if (mode != "per_height" && mode != "per_element")
        throw FormatError("unknown BN param_mode: " + mode);
      layer.kind = BnSpec{mode == "per_height" ? BnParamMode::per_height : BnParamMode::per_element,
                          rec.value("eps", 1e-8)};
    } else {
      throw FormatError("unknown layer type: " + type);
    }
    spec.layers.push_back(std::move(layer));
  }
  (void)spec.infer_shapes();
  return spec;
}

}  // namespace nds::nn
