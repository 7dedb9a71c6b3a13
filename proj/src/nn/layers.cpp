#include "hism/nn/layers.hpp"

namespace hism::nn {

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::maxpool2: return "maxpool2";
    case LayerKind::relu: return "relu";
    case LayerKind::dense: return "dense";
    case LayerKind::sigmoid: return "sigmoid";
    case LayerKind::flatten: return "flatten";
    case LayerKind::lstm: return "lstm";
  }
  return "?";
}

LayerKind layer_kind_from_string(const std::string& s) {
  for (auto k : {LayerKind::conv2d, LayerKind::maxpool2, LayerKind::relu, LayerKind::dense,
                 LayerKind::sigmoid, LayerKind::flatten, LayerKind::lstm})
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::invalid_argument, "unknown layer kind '" + s + "'");
}

void to_json(nlohmann::json& j, const LayerSpec& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case LayerKind::conv2d:
      j["in"] = s.in;
      j["out"] = s.out;
      j["kernel"] = s.kernel;
      j["stride"] = s.stride;
      j["padding"] = s.effective_padding();
      break;
    case LayerKind::dense:
      j["in"] = s.in;
      j["out"] = s.out;
      break;
    case LayerKind::lstm:
      j["in"] = s.in;
      j["hidden"] = s.out;
      j["layers"] = s.layers;
      break;
    default:
      break;
  }
}

void from_json(const nlohmann::json& j, LayerSpec& s) {
  switch (layer_kind_from_string(j.at("kind").get<std::string>())) {
    case LayerKind::conv2d:
      s = LayerSpec::conv2d(j.at("in").get<int>(), j.at("out").get<int>(), j.value("kernel", 3), j.value("stride", 1),
                            j.value("padding", -1));
      break;
    case LayerKind::dense:
      s = LayerSpec::dense(j.at("in").get<int>(), j.at("out").get<int>());
      break;
    case LayerKind::lstm:
      s = LayerSpec::lstm(j.at("in").get<int>(), j.at("hidden").get<int>(), j.value("layers", 1));
      break;
    case LayerKind::maxpool2:
      s = LayerSpec::maxpool2();
      break;
    case LayerKind::relu:
      s = LayerSpec::relu();
      break;
    case LayerKind::sigmoid:
      s = LayerSpec::sigmoid();
      break;
    case LayerKind::flatten:
      s = LayerSpec::flatten();
      break;
  }
}

}  // namespace hism::nn
