#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hism/scene/layout.hpp"
#include "hism/scene/raster.hpp"
#include "hism/scene/render.hpp"

namespace hism::sim {

/// Per-(drone, channel) series, piecewise constant on a 1 s grid.
struct TelemetrySeries {
  int num_drones = 0;
  std::vector<std::string> channels;
  double step_s = 1.0;
  int num_steps = 0;
  std::vector<double> data;  // [drone][channel][step]

  double at_step(int drone, int channel, int step) const {
    return data[(static_cast<std::size_t>(drone) * channels.size() + static_cast<std::size_t>(channel)) *
                    static_cast<std::size_t>(num_steps) +
                static_cast<std::size_t>(step)];
  }
  double value(int drone, int channel, double t) const;

  friend bool operator==(const TelemetrySeries&, const TelemetrySeries&) = default;
};

TelemetrySeries simulate_telemetry(const scene::InterfaceLayout& layout, double duration, std::uint64_t seed);

struct CriticalSituation {
  int cs_id = 0;
  int drone_index = 0;
  std::string channel;
  double onset_time = 0.0;
  double duration = 0.0;
  bool highlighted = false;

  double end_time() const { return onset_time + duration; }
  bool active_at(double t) const { return t >= onset_time && t < end_time(); }
  friend bool operator==(const CriticalSituation&, const CriticalSituation&) = default;
};

struct SagatProbe {
  int probe_id = 0;
  double pause_time = 0.0;
  int drone_index = 0;
  std::string channel;
  std::array<double, 4> options{};
  int correct_index = 0;
  friend bool operator==(const SagatProbe&, const SagatProbe&) = default;
};

struct ScheduleParams {
  double duration = 300.0;
  double cs_rate = 2.0;  // per minute
  double highlight_prob = 0.5;
  int probe_count = 3;
  double cs_duration = 10.0;
  double min_gap = 8.0;
  /// CS onsets keep this much session time before/after them, so every
  /// event-aligned analysis window lies inside the session.
  double lead = 5.0;
  double tail = 10.0;
  double frame_rate = 10.0;
  /// Onsets are snapped to this grid (the saliency window width).
  double onset_grid = 0.5;

  friend bool operator==(const ScheduleParams&, const ScheduleParams&) = default;
};

nlohmann::ordered_json to_json(const ScheduleParams& p);
ScheduleParams schedule_params_from_json(const nlohmann::json& j);

struct SessionScript {
  std::string session_id;
  std::uint64_t seed = 0;
  double duration = 0.0;
  double frame_rate = 10.0;
  ScheduleParams params;
  scene::InterfaceLayout layout;
  TelemetrySeries telemetry;
  std::vector<CriticalSituation> cs_list;
  std::vector<SagatProbe> probes;

  int frame_count() const;
  scene::TelemetrySnapshot snapshot_at(double t) const;
  scene::HighlightState highlights_at(double t) const;
  scene::FrameRaster render_at(double t) const;
  /// Id of the icon / parameter elements forming the CS area of interest.
  int cs_icon_id(const CriticalSituation& cs) const;
  int cs_parameter_id(const CriticalSituation& cs) const;
  scene::Rect cs_aoi(const CriticalSituation& cs) const;

  friend bool operator==(const SessionScript&, const SessionScript&) = default;
};

SessionScript schedule_session(const ScheduleParams& params, const scene::InterfaceLayout& layout,
                               std::uint64_t seed);

nlohmann::ordered_json to_json(const SessionScript& script);
SessionScript script_from_json(const nlohmann::json& j);

}  // namespace hism::sim
