#include "hism/model/config.hpp"

#include "hism/error.hpp"

namespace hism::model {

using nn::LayerSpec;

std::vector<LayerSpec> conv_backbone(int height, int width, const std::vector<int>& channels,
                                     int spatial_dim) {
  std::vector<LayerSpec> out;
  int c = 4, h = height, w = width;
  for (const int next : channels) {
    out.push_back(LayerSpec::conv2d(c, next));
    out.push_back(LayerSpec::relu());
    out.push_back(LayerSpec::maxpool2());
    c = next;
    h /= 2;
    w /= 2;
  }
  out.push_back(LayerSpec::flatten());
  out.push_back(LayerSpec::dense(c * h * w, spatial_dim));
  out.push_back(LayerSpec::relu());
  return out;
}

std::vector<LayerSpec> HismConfig::lstm_layers_spec() const {
  return {LayerSpec::lstm(1, lstm_hidden, lstm_layers)};
}

std::vector<LayerSpec> HismConfig::mlp_spec() const {
  std::vector<LayerSpec> out;
  int in = spatial_dim + lstm_hidden;
  for (const int h : mlp_hidden) {
    out.push_back(LayerSpec::dense(in, h));
    out.push_back(LayerSpec::relu());
    in = h;
  }
  out.push_back(LayerSpec::dense(in, 1));
  out.push_back(LayerSpec::sigmoid());
  return out;
}

void HismConfig::validate() const {
  if (global_h < 1 || global_w < 1) throw Error(ErrorCode::invalid_argument, "global_input must be positive");
  if (history_len < 1) throw Error(ErrorCode::invalid_argument, "history_len must be >= 1");
  if (lstm_layers != 2) throw Error(ErrorCode::invalid_argument, "lstm must have exactly 2 layers");
  if (mlp_hidden.size() != 2)
    throw Error(ErrorCode::invalid_argument, "mlp must have exactly 3 dense layers");
  if (lstm_hidden < 1 || spatial_dim < 1 || crop_size < 2 || crop_pad < 0 || !(window_width > 0))
    throw Error(ErrorCode::invalid_argument, "non-positive model dimension");
  nn::Sequential<float> bb("backbone", backbone);
  const nn::Shape out = bb.output_shape({4, std::size_t(global_h), std::size_t(global_w)});
  if (out != nn::Shape{std::size_t(spatial_dim)})
    throw Error(ErrorCode::shape_mismatch,
                "backbone yields " + nn::shape_string(out) + ", spatial_dim is " +
                    std::to_string(spatial_dim));
}

HismConfig default_config() {
  HismConfig c;
  c.backbone = conv_backbone(c.global_h, c.global_w, {8, 16, 32}, c.spatial_dim);
  return c;
}

HismConfig tiny_config() {
  HismConfig c;
  c.global_h = 20;
  c.global_w = 32;
  c.history_len = 4;
  c.spatial_dim = 8;
  c.lstm_hidden = 5;
  c.mlp_hidden = {8, 6};
  c.backbone = conv_backbone(c.global_h, c.global_w, {3, 4}, c.spatial_dim);
  return c;
}

nlohmann::ordered_json to_json(const HismConfig& c) {
  nlohmann::ordered_json j;
  j["global_input"] = {c.global_h, c.global_w};
  j["history_len"] = c.history_len;
  nlohmann::ordered_json bb = nlohmann::ordered_json::array();
  for (const auto& l : c.backbone) {
    nlohmann::json lj = l;
    bb.push_back(nlohmann::ordered_json::parse(lj.dump()));
  }
  j["backbone"] = bb;
  j["spatial_dim"] = c.spatial_dim;
  j["lstm_hidden"] = c.lstm_hidden;
  j["lstm_layers"] = c.lstm_layers;
  j["mlp_hidden"] = c.mlp_hidden;
  j["window_width"] = c.window_width;
  j["crop_size"] = c.crop_size;
  j["crop_pad"] = c.crop_pad;
  return j;
}

HismConfig config_from_json(const nlohmann::json& j) {
  HismConfig c = default_config();
  try {
    if (j.contains("global_input")) {
      c.global_h = j["global_input"].at(0).get<int>();
      c.global_w = j["global_input"].at(1).get<int>();
    }
    c.history_len = j.value("history_len", c.history_len);
    c.spatial_dim = j.value("spatial_dim", c.spatial_dim);
    c.lstm_hidden = j.value("lstm_hidden", c.lstm_hidden);
    c.lstm_layers = j.value("lstm_layers", c.lstm_layers);
    if (j.contains("mlp_hidden")) c.mlp_hidden = j["mlp_hidden"].get<std::vector<int>>();
    c.window_width = j.value("window_width", c.window_width);
    c.crop_size = j.value("crop_size", c.crop_size);
    c.crop_pad = j.value("crop_pad", c.crop_pad);
    if (j.contains("backbone"))
      c.backbone = j["backbone"].get<std::vector<LayerSpec>>();
    else
      c.backbone = conv_backbone(c.global_h, c.global_w, {8, 16, 32}, c.spatial_dim);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace hism::model
