#include "hism/sim/responses.hpp"

#include <algorithm>

#include "hism/random.hpp"

namespace hism::sim {

EventLog simulate_responses(const SessionScript& script, std::span<const gaze::GazeSample> samples,
                            std::uint64_t seed, const gaze::IdtParams& idt) {
  EventLog events;
  Rng rng(derive_seed(seed, 21));
  const auto fixations = gaze::detect_fixations_idt(samples, idt);

  for (const auto& cs : script.cs_list) {
    nlohmann::ordered_json payload{{"cs_id", cs.cs_id},
                                   {"drone_index", cs.drone_index},
                                   {"channel", cs.channel},
                                   {"highlighted", cs.highlighted}};
    events.push_back({cs.onset_time, "cs_onset", payload});
    if (cs.highlighted)
      events.push_back({cs.onset_time, "highlight_on", {{"cs_id", cs.cs_id}, {"element_id", script.cs_icon_id(cs)}}});
    if (cs.end_time() <= script.duration) {
      events.push_back({cs.end_time(), "cs_end", {{"cs_id", cs.cs_id}}});
      if (cs.highlighted)
        events.push_back(
            {cs.end_time(), "highlight_off", {{"cs_id", cs.cs_id}, {"element_id", script.cs_icon_id(cs)}}});
    }
  }

  for (const auto& cs : script.cs_list) {
    const auto aoi = script.cs_aoi(cs);
    const double delay = rng.uniform(0.3, 0.6);
    const auto first = std::find_if(fixations.begin(), fixations.end(), [&](const gaze::Fixation& f) {
      return cs.active_at(f.start) && aoi.contains(f.x, f.y);
    });
    if (first == fixations.end()) continue;
    const double t = first->start + delay;
    if (t <= script.duration) events.push_back({t, "keypress", {{"key", "space"}, {"cs_id", cs.cs_id}}});
  }

  for (const auto& probe : script.probes) {
    events.push_back({probe.pause_time,
                      "probe_shown",
                      {{"probe_id", probe.probe_id},
                       {"drone_index", probe.drone_index},
                       {"channel", probe.channel},
                       {"options", probe.options}}});
    const auto aoi = script.layout.aoi_rect(probe.drone_index, script.layout.channel_index(probe.channel));
    const bool recently_seen = std::any_of(fixations.begin(), fixations.end(), [&](const gaze::Fixation& f) {
      return f.start >= probe.pause_time - 10.0 && f.start <= probe.pause_time && aoi.contains(f.x, f.y);
    });
    int choice = static_cast<int>(rng.below(4));
    if (recently_seen && rng.bernoulli(0.9)) choice = probe.correct_index;
    events.push_back({probe.pause_time,
                      "probe_answer",
                      {{"probe_id", probe.probe_id}, {"choice", choice}, {"correct", choice == probe.correct_index}}});
  }

  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  return events;
}

}  // namespace hism::sim
