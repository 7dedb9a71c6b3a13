#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "hism/gaze/types.hpp"
#include "hism/sim/session.hpp"

namespace hism::sim {

/// Generative participant model. Scanning cycles round-robin over drone
/// panels; a highlighted CS pulls gaze after a truncated-normal latency, a
/// plain CS is noticed only when the scan reaches its panel. After detection
/// gaze dwells on the icon and parameter, then scanning resumes at the next panel.
struct BehaviorParams {
  double scan_dwell_mean = 0.35;
  int scan_elements_per_panel = 3;
  double highlight_capture_latency_mean = 1.0;
  double highlight_capture_latency_sd = 0.25;
  double highlight_capture_latency_min = 0.2;
  double aoi_dwell_after_detect_mean = 2.0;
  /// Upper bound on the post-detection dwell before scanning resumes.
  double return_to_scan_time = 3.0;
  double aoi_fixation_mean = 0.4;
  /// Probability of one glance away from (and back to) the AOI during the dwell.
  double checkback_prob = 0.3;
  double saccade_duration = 0.03;
  double gaze_noise_sd = 5.0;
  double sample_rate = 60.0;

  void validate() const;
  friend bool operator==(const BehaviorParams&, const BehaviorParams&) = default;
};

nlohmann::ordered_json to_json(const BehaviorParams& p);
BehaviorParams behavior_from_json(const nlohmann::json& j);

/// Planned fixation target: gaze arrives at (x, y) at `arrival`.
struct GazeTarget {
  double arrival = 0.0;
  double x = 0.0;
  double y = 0.0;
};

std::vector<GazeTarget> plan_gaze_targets(const SessionScript& script, const BehaviorParams& behavior,
                                          std::uint64_t seed);

std::vector<gaze::GazeSample> simulate_gaze(const SessionScript& script, const BehaviorParams& behavior,
                                            std::uint64_t seed);

}  // namespace hism::sim
