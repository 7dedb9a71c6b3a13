#pragma once

#include <string>

namespace hism::scene {

/// Value range and display precision of a telemetry channel.
struct ChannelSpec {
  double min = 0.0;
  double max = 100.0;
  int decimals = 0;
  double walk_sd = 1.0;  // per-second random-walk step
  bool wraps = false;    // heading-like channels wrap around instead of clamping
};

/// Known channels get physical ranges; unknown names fall back to [0, 100].
ChannelSpec channel_spec(const std::string& name);

/// Rounds to the channel's display precision.
double round_to_channel(const ChannelSpec& spec, double value);

}  // namespace hism::scene
