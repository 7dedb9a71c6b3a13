#include "hism/sim/session.hpp"

#include <algorithm>
#include <cmath>

#include "hism/error.hpp"
#include "hism/random.hpp"
#include "hism/scene/channels.hpp"

namespace hism::sim {

double TelemetrySeries::value(int drone, int channel, double t) const {
  const int step = std::clamp(static_cast<int>(std::floor(t / step_s)), 0, num_steps - 1);
  return at_step(drone, channel, step);
}

TelemetrySeries simulate_telemetry(const scene::InterfaceLayout& layout, double duration, std::uint64_t seed) {
  if (!(duration > 0.0)) throw Error(ErrorCode::invalid_argument, "telemetry duration must be positive");
  TelemetrySeries series;
  series.num_drones = layout.num_drones();
  series.channels = layout.channels;
  series.num_steps = static_cast<int>(std::floor(duration)) + 1;
  series.data.reserve(static_cast<std::size_t>(series.num_drones) * series.channels.size() *
                      static_cast<std::size_t>(series.num_steps));
  for (int d = 0; d < series.num_drones; ++d) {
    for (std::size_t c = 0; c < series.channels.size(); ++c) {
      Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(d) * 64 + c));
      const auto spec = scene::channel_spec(series.channels[c]);
      const double span = spec.max - spec.min;
      double v = spec.min + span * rng.uniform(0.2, 0.8);
      for (int k = 0; k < series.num_steps; ++k) {
        series.data.push_back(scene::round_to_channel(spec, v));
        v += rng.normal(0.0, spec.walk_sd);
        if (spec.wraps) {
          v = spec.min + std::fmod(std::fmod(v - spec.min, span) + span, span);
        } else {
          v = std::clamp(v, spec.min, spec.max);
        }
      }
    }
  }
  return series;
}

int SessionScript::frame_count() const {
  return static_cast<int>(std::ceil(duration * frame_rate - 1e-9));
}

scene::TelemetrySnapshot SessionScript::snapshot_at(double t) const {
  scene::TelemetrySnapshot snap;
  const auto n_channels = static_cast<std::size_t>(layout.num_channels());
  snap.values.assign(static_cast<std::size_t>(layout.num_drones()), std::vector<double>(n_channels));
  snap.alerts.assign(static_cast<std::size_t>(layout.num_drones()), std::vector<bool>(n_channels, false));
  for (int d = 0; d < layout.num_drones(); ++d)
    for (int c = 0; c < layout.num_channels(); ++c)
      snap.values[static_cast<std::size_t>(d)][static_cast<std::size_t>(c)] = telemetry.value(d, c, t);
  for (const auto& cs : cs_list)
    if (cs.active_at(t))
      snap.alerts[static_cast<std::size_t>(cs.drone_index)][static_cast<std::size_t>(layout.channel_index(cs.channel))] =
          true;
  return snap;
}

scene::HighlightState SessionScript::highlights_at(double t) const {
  scene::HighlightState state;
  for (const auto& cs : cs_list)
    if (cs.highlighted && cs.active_at(t)) state.highlighted.insert(cs_icon_id(cs));
  return state;
}

scene::FrameRaster SessionScript::render_at(double t) const {
  return scene::render_frame(layout, snapshot_at(t), highlights_at(t));
}

int SessionScript::cs_icon_id(const CriticalSituation& cs) const {
  return layout.icon(cs.drone_index, layout.channel_index(cs.channel)).id;
}

int SessionScript::cs_parameter_id(const CriticalSituation& cs) const {
  return layout.parameter(cs.drone_index, layout.channel_index(cs.channel)).id;
}

scene::Rect SessionScript::cs_aoi(const CriticalSituation& cs) const {
  return layout.aoi_rect(cs.drone_index, layout.channel_index(cs.channel));
}

SessionScript schedule_session(const ScheduleParams& params, const scene::InterfaceLayout& layout,
                               std::uint64_t seed) {
  if (!(params.duration > 0.0)) throw Error(ErrorCode::invalid_argument, "session duration must be positive");
  if (!(params.highlight_prob >= 0.0 && params.highlight_prob <= 1.0))
    throw Error(ErrorCode::invalid_argument, "highlight_prob must lie in [0, 1]");
  if (params.cs_rate < 0.0 || params.probe_count < 0 || !(params.cs_duration > 0.0) || params.min_gap < 0.0 ||
      !(params.frame_rate > 0.0) || !(params.onset_grid > 0.0))
    throw Error(ErrorCode::invalid_argument, "invalid schedule parameters");

  SessionScript script;
  script.seed = seed;
  script.duration = params.duration;
  script.frame_rate = params.frame_rate;
  script.params = params;
  script.layout = layout;
  script.telemetry = simulate_telemetry(layout, params.duration, derive_seed(seed, 1));

  Rng rng(derive_seed(seed, 2));
  const int n_cs = static_cast<int>(std::lround(params.cs_rate * params.duration / 60.0));
  if (n_cs > 0) {
    // Work in grid units: onsets are lead + slack_i + i * gap, with the slack
    // values a sorted uniform draw, so every gap-respecting configuration is reachable.
    const double grid = params.onset_grid;
    const auto lo = static_cast<long>(std::ceil(params.lead / grid - 1e-9));
    const auto hi = static_cast<long>(std::floor((params.duration - params.tail) / grid + 1e-9));
    const auto gap = static_cast<long>(std::ceil(params.min_gap / grid - 1e-9));
    const long free_units = (hi - lo) - static_cast<long>(n_cs - 1) * gap;
    if (hi < lo || free_units < 0)
      throw Error(ErrorCode::infeasible_schedule, std::to_string(n_cs) + " critical situations with " +
                                                      std::to_string(params.min_gap) + " s gaps do not fit " +
                                                      std::to_string(params.duration) + " s");
    std::vector<long> slack(static_cast<std::size_t>(n_cs));
    for (auto& s : slack) s = static_cast<long>(rng.below(static_cast<std::uint64_t>(free_units) + 1));
    std::sort(slack.begin(), slack.end());

    std::vector<double> drone_busy_until(static_cast<std::size_t>(layout.num_drones()), -1.0);
    for (int i = 0; i < n_cs; ++i) {
      CriticalSituation cs;
      cs.cs_id = i;
      cs.onset_time = static_cast<double>(lo + slack[static_cast<std::size_t>(i)] + i * gap) * grid;
      cs.duration = params.cs_duration;
      std::vector<int> free;
      for (int d = 0; d < layout.num_drones(); ++d)
        if (drone_busy_until[static_cast<std::size_t>(d)] <= cs.onset_time) free.push_back(d);
      if (free.empty())
        throw Error(ErrorCode::infeasible_schedule, "no drone free for critical situation " + std::to_string(i));
      cs.drone_index = free[rng.below(free.size())];
      cs.channel = layout.channels[rng.below(layout.channels.size())];
      cs.highlighted = rng.bernoulli(params.highlight_prob);
      drone_busy_until[static_cast<std::size_t>(cs.drone_index)] = cs.end_time();
      script.cs_list.push_back(cs);
    }
  }

  for (int p = 0; p < params.probe_count; ++p) {
    SagatProbe probe;
    probe.probe_id = p;
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const double t = std::round(rng.uniform(1.0, std::max(1.0, params.duration - 1.0)) * 10.0) / 10.0;
      placed = std::none_of(script.cs_list.begin(), script.cs_list.end(),
                            [&](const CriticalSituation& cs) { return std::abs(t - cs.onset_time) <= 1.0; }) &&
               std::none_of(script.probes.begin(), script.probes.end(),
                            [&](const SagatProbe& q) { return q.pause_time == t; });
      probe.pause_time = t;
    }
    if (!placed) throw Error(ErrorCode::infeasible_schedule, "no room for SAGAT probe " + std::to_string(p));
    probe.drone_index = static_cast<int>(rng.below(static_cast<std::uint64_t>(layout.num_drones())));
    const int c = static_cast<int>(rng.below(layout.channels.size()));
    probe.channel = layout.channels[static_cast<std::size_t>(c)];
    const auto spec = scene::channel_spec(probe.channel);
    const double truth = script.telemetry.value(probe.drone_index, c, probe.pause_time);
    const double unit = std::pow(10.0, -spec.decimals) * std::max(1.0, std::round((spec.max - spec.min) / 20.0));
    std::array<double, 4> opts{truth, truth, truth, truth};
    // Distractors step away from the truth on the side that stays in range.
    for (int k = 1; k < 4; ++k) {
      const double up = truth + k * unit;
      opts[static_cast<std::size_t>(k)] = scene::round_to_channel(spec, up <= spec.max ? up : truth - k * unit);
    }
    std::array<int, 4> order{0, 1, 2, 3};
    rng.shuffle(order.begin(), order.end());
    for (int k = 0; k < 4; ++k) {
      probe.options[static_cast<std::size_t>(k)] = opts[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
      if (order[static_cast<std::size_t>(k)] == 0) probe.correct_index = k;
    }
    script.probes.push_back(probe);
  }
  std::sort(script.probes.begin(), script.probes.end(),
            [](const SagatProbe& a, const SagatProbe& b) { return a.pause_time < b.pause_time; });
  for (std::size_t i = 0; i < script.probes.size(); ++i) script.probes[i].probe_id = static_cast<int>(i);
  return script;
}

nlohmann::ordered_json to_json(const ScheduleParams& p) {
  return {{"duration", p.duration},       {"cs_rate", p.cs_rate},   {"highlight_prob", p.highlight_prob},
          {"probe_count", p.probe_count}, {"cs_duration", p.cs_duration}, {"min_gap", p.min_gap},
          {"lead", p.lead},               {"tail", p.tail},         {"frame_rate", p.frame_rate},
          {"onset_grid", p.onset_grid}};
}

ScheduleParams schedule_params_from_json(const nlohmann::json& j) {
  ScheduleParams p;
  p.duration = j.value("duration", p.duration);
  p.cs_rate = j.value("cs_rate", p.cs_rate);
  p.highlight_prob = j.value("highlight_prob", p.highlight_prob);
  p.probe_count = j.value("probe_count", p.probe_count);
  p.cs_duration = j.value("cs_duration", p.cs_duration);
  p.min_gap = j.value("min_gap", p.min_gap);
  p.lead = j.value("lead", p.lead);
  p.tail = j.value("tail", p.tail);
  p.frame_rate = j.value("frame_rate", p.frame_rate);
  p.onset_grid = j.value("onset_grid", p.onset_grid);
  return p;
}

nlohmann::ordered_json to_json(const SessionScript& s) {
  nlohmann::ordered_json j;
  j["schema"] = "hism.session/1";
  j["session_id"] = s.session_id;
  j["seed"] = s.seed;
  j["duration"] = s.duration;
  j["frame_rate"] = s.frame_rate;
  j["highlight_prob"] = s.params.highlight_prob;
  j["params"] = to_json(s.params);
  j["layout"] = scene::to_json(s.layout);
  auto& tel = j["telemetry"];
  tel["step_s"] = s.telemetry.step_s;
  tel["num_steps"] = s.telemetry.num_steps;
  tel["channels"] = s.telemetry.channels;
  auto& series = tel["series"] = nlohmann::ordered_json::array();
  for (int d = 0; d < s.telemetry.num_drones; ++d) {
    auto per_channel = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < s.telemetry.channels.size(); ++c) {
      auto values = nlohmann::ordered_json::array();
      for (int k = 0; k < s.telemetry.num_steps; ++k) values.push_back(s.telemetry.at_step(d, static_cast<int>(c), k));
      per_channel.push_back(std::move(values));
    }
    series.push_back(std::move(per_channel));
  }
  auto& cs_list = j["cs_list"] = nlohmann::ordered_json::array();
  for (const auto& cs : s.cs_list)
    cs_list.push_back({{"cs_id", cs.cs_id},
                       {"drone_index", cs.drone_index},
                       {"channel", cs.channel},
                       {"onset_time", cs.onset_time},
                       {"duration", cs.duration},
                       {"highlighted", cs.highlighted}});
  auto& probes = j["probes"] = nlohmann::ordered_json::array();
  for (const auto& p : s.probes)
    probes.push_back({{"probe_id", p.probe_id},
                      {"pause_time", p.pause_time},
                      {"drone_index", p.drone_index},
                      {"channel", p.channel},
                      {"options", p.options},
                      {"correct_index", p.correct_index}});
  return j;
}

SessionScript script_from_json(const nlohmann::json& j) {
  try {
    SessionScript s;
    s.session_id = j.value("session_id", std::string{});
    s.seed = j.at("seed").get<std::uint64_t>();
    s.duration = j.at("duration").get<double>();
    s.frame_rate = j.at("frame_rate").get<double>();
    s.params = schedule_params_from_json(j.at("params"));
    s.layout = scene::layout_from_json(j.at("layout"));
    const auto& tel = j.at("telemetry");
    s.telemetry.step_s = tel.at("step_s").get<double>();
    s.telemetry.num_steps = tel.at("num_steps").get<int>();
    s.telemetry.channels = tel.at("channels").get<std::vector<std::string>>();
    const auto& series = tel.at("series");
    s.telemetry.num_drones = static_cast<int>(series.size());
    for (const auto& per_channel : series) {
      if (per_channel.size() != s.telemetry.channels.size())
        throw Error(ErrorCode::parse_error, "telemetry channel count mismatch");
      for (const auto& values : per_channel) {
        if (static_cast<int>(values.size()) != s.telemetry.num_steps)
          throw Error(ErrorCode::parse_error, "telemetry step count mismatch");
        for (const auto& v : values) s.telemetry.data.push_back(v.get<double>());
      }
    }
    for (const auto& c : j.at("cs_list"))
      s.cs_list.push_back({c.at("cs_id").get<int>(), c.at("drone_index").get<int>(), c.at("channel").get<std::string>(),
                           c.at("onset_time").get<double>(), c.at("duration").get<double>(),
                           c.at("highlighted").get<bool>()});
    for (const auto& p : j.at("probes"))
      s.probes.push_back({p.at("probe_id").get<int>(), p.at("pause_time").get<double>(), p.at("drone_index").get<int>(),
                          p.at("channel").get<std::string>(), p.at("options").get<std::array<double, 4>>(),
                          p.at("correct_index").get<int>()});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("session.json: ") + e.what());
  }
}

}  // namespace hism::sim
