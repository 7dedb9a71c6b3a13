#include "hism/scene/channels.hpp"

#include <cmath>

namespace hism::scene {

ChannelSpec channel_spec(const std::string& name) {
  if (name == "battery") return {0.0, 100.0, 0, 0.6, false};
  if (name == "altitude") return {0.0, 500.0, 0, 6.0, false};
  if (name == "speed") return {0.0, 30.0, 1, 0.8, false};
  if (name == "signal") return {0.0, 100.0, 0, 2.5, false};
  if (name == "payload") return {0.0, 5.0, 1, 0.05, false};
  if (name == "heading") return {0.0, 360.0, 0, 8.0, true};
  return {};
}

double round_to_channel(const ChannelSpec& spec, double value) {
  const double scale = std::pow(10.0, spec.decimals);
  return std::round(value * scale) / scale;
}

}  // namespace hism::scene
