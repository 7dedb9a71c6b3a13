#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "hism/nn/layers.hpp"

namespace hism::model {

struct HismConfig {
  int global_h = 50;
  int global_w = 80;
  int history_len = 10;
  std::vector<nn::LayerSpec> backbone;
  int spatial_dim = 64;
  int lstm_hidden = 32;
  int lstm_layers = 2;
  std::vector<int> mlp_hidden{64, 16};
  double window_width = 0.5;
  int crop_size = 16;
  int crop_pad = 4;

  /// Throws InvalidArgument or ShapeMismatch.
  void validate() const;

  std::vector<nn::LayerSpec> lstm_layers_spec() const;
  std::vector<nn::LayerSpec> mlp_spec() const;

  friend bool operator==(const HismConfig&, const HismConfig&) = default;
};

/// conv3x3+relu+pool blocks over a 4-channel input, then flatten, dense, relu.
std::vector<nn::LayerSpec> conv_backbone(int height, int width, const std::vector<int>& channels,
                                         int spatial_dim);

HismConfig default_config();
/// Small instantiation used for gradient checks.
HismConfig tiny_config();

nlohmann::ordered_json to_json(const HismConfig& c);
HismConfig config_from_json(const nlohmann::json& j);

}  // namespace hism::model
