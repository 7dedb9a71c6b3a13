#include "hism/sim/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>

#include "hism/error.hpp"
#include "hism/random.hpp"

namespace hism::sim {

void BehaviorParams::validate() const {
  const bool ok = scan_dwell_mean > 0 && scan_elements_per_panel > 0 && highlight_capture_latency_mean > 0 &&
                  highlight_capture_latency_sd >= 0 && highlight_capture_latency_min > 0 &&
                  aoi_dwell_after_detect_mean > 0 && return_to_scan_time > 0 && aoi_fixation_mean > 0 &&
                  checkback_prob >= 0 && checkback_prob <= 1 && saccade_duration > 0 && gaze_noise_sd >= 0 &&
                  sample_rate > 0;
  if (!ok) throw Error(ErrorCode::invalid_argument, "behavior parameters must be positive");
}

nlohmann::ordered_json to_json(const BehaviorParams& p) {
  return {{"scan_dwell_mean", p.scan_dwell_mean},
          {"scan_elements_per_panel", p.scan_elements_per_panel},
          {"highlight_capture_latency_mean", p.highlight_capture_latency_mean},
          {"highlight_capture_latency_sd", p.highlight_capture_latency_sd},
          {"highlight_capture_latency_min", p.highlight_capture_latency_min},
          {"aoi_dwell_after_detect_mean", p.aoi_dwell_after_detect_mean},
          {"return_to_scan_time", p.return_to_scan_time},
          {"aoi_fixation_mean", p.aoi_fixation_mean},
          {"checkback_prob", p.checkback_prob},
          {"saccade_duration", p.saccade_duration},
          {"gaze_noise_sd", p.gaze_noise_sd},
          {"sample_rate", p.sample_rate}};
}

BehaviorParams behavior_from_json(const nlohmann::json& j) {
  BehaviorParams p;
  p.scan_dwell_mean = j.value("scan_dwell_mean", p.scan_dwell_mean);
  p.scan_elements_per_panel = j.value("scan_elements_per_panel", p.scan_elements_per_panel);
  p.highlight_capture_latency_mean = j.value("highlight_capture_latency_mean", p.highlight_capture_latency_mean);
  p.highlight_capture_latency_sd = j.value("highlight_capture_latency_sd", p.highlight_capture_latency_sd);
  p.highlight_capture_latency_min = j.value("highlight_capture_latency_min", p.highlight_capture_latency_min);
  p.aoi_dwell_after_detect_mean = j.value("aoi_dwell_after_detect_mean", p.aoi_dwell_after_detect_mean);
  p.return_to_scan_time = j.value("return_to_scan_time", p.return_to_scan_time);
  p.aoi_fixation_mean = j.value("aoi_fixation_mean", p.aoi_fixation_mean);
  p.checkback_prob = j.value("checkback_prob", p.checkback_prob);
  p.saccade_duration = j.value("saccade_duration", p.saccade_duration);
  p.gaze_noise_sd = j.value("gaze_noise_sd", p.gaze_noise_sd);
  p.sample_rate = j.value("sample_rate", p.sample_rate);
  return p;
}

namespace {

class Planner {
 public:
  Planner(const SessionScript& script, const BehaviorParams& b, std::uint64_t seed)
      : script_(script), b_(b), rng_(derive_seed(seed, 11)), acknowledged_(script.cs_list.size(), false) {
    Rng latency_rng(derive_seed(seed, 12));
    for (const auto& cs : script.cs_list) {
      const double latency = std::max(b.highlight_capture_latency_min,
                                      latency_rng.normal(b.highlight_capture_latency_mean,
                                                         b.highlight_capture_latency_sd));
      capture_.push_back(cs.highlighted ? cs.onset_time + latency : -1.0);
    }
  }

  std::vector<GazeTarget> run() {
    double t = 0.0;
    while (t < script_.duration) {
      if (auto i = due_capture(t)) {
        t = dwell(*i, t);
        continue;
      }
      if (queue_.empty()) refill_next_panel(t);
      if (auto i = active_on_panel(scan_drone_, t)) {
        t = dwell(*i, t);
        continue;
      }
      const int id = queue_.front();
      queue_.pop_front();
      add(t, id);
      double end = t + std::max(0.1, rng_.gamma(4.0, b_.scan_dwell_mean / 4.0));
      if (auto c = capture_between(t, end)) end = capture_[*c];
      t = end;
    }
    return std::move(targets_);
  }

 private:
  void add(double arrival, int element_id) {
    const auto& r = script_.layout.element(element_id).rect;
    targets_.push_back({arrival, r.center_x() + rng_.uniform(-0.25, 0.25) * r.w,
                        r.center_y() + rng_.uniform(-0.25, 0.25) * r.h});
  }

  bool acknowledged_aoi(int element_id, double t) const {
    const auto& e = script_.layout.element(element_id);
    for (std::size_t i = 0; i < script_.cs_list.size(); ++i) {
      const auto& cs = script_.cs_list[i];
      if (acknowledged_[i] && cs.active_at(t) && cs.drone_index == e.drone_index && cs.channel == e.channel)
        return true;
    }
    return false;
  }

  void refill_next_panel(double t) {
    const int n = script_.layout.num_drones();
    scan_drone_ = (scan_drone_ + 1) % n;
    std::vector<int> candidates;
    for (const auto& e : script_.layout.elements)
      if (e.drone_index == scan_drone_ && !acknowledged_aoi(e.id, t)) candidates.push_back(e.id);
    rng_.shuffle(candidates.begin(), candidates.end());
    const auto k = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(b_.scan_elements_per_panel));
    queue_.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k));
    if (queue_.empty()) queue_.push_back(script_.layout.icon(scan_drone_, 0).id);
  }

  std::optional<std::size_t> due_capture(double t) const {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < capture_.size(); ++i) {
      if (acknowledged_[i] || capture_[i] < 0.0 || capture_[i] > t || !script_.cs_list[i].active_at(t)) continue;
      if (!best || capture_[i] < capture_[*best]) best = i;
    }
    return best;
  }

  std::optional<std::size_t> capture_between(double from, double to) const {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < capture_.size(); ++i) {
      if (acknowledged_[i] || capture_[i] <= from || capture_[i] >= to) continue;
      if (!best || capture_[i] < capture_[*best]) best = i;
    }
    return best;
  }

  std::optional<std::size_t> active_on_panel(int drone, double t) const {
    for (std::size_t i = 0; i < script_.cs_list.size(); ++i) {
      const auto& cs = script_.cs_list[i];
      if (!acknowledged_[i] && cs.drone_index == drone && cs.active_at(t)) return i;
    }
    return std::nullopt;
  }

  double dwell(std::size_t i, double t) {
    const auto& cs = script_.cs_list[i];
    const int icon = script_.cs_icon_id(cs);
    const int param = script_.cs_parameter_id(cs);
    double total = std::clamp(rng_.gamma(2.0, b_.aoi_dwell_after_detect_mean / 2.0), 0.4, b_.return_to_scan_time);
    const bool checkback = rng_.bernoulli(b_.checkback_prob);
    const double checkback_at = rng_.uniform(0.3, 0.7) * total;
    bool excursion_done = false;
    bool on_icon = true;
    double elapsed = 0.0;
    while (total - elapsed >= 0.15) {
      if (checkback && !excursion_done && elapsed >= checkback_at) {
        std::vector<int> others;
        for (const auto& e : script_.layout.elements)
          if (e.drone_index == cs.drone_index && e.id != icon && e.id != param) others.push_back(e.id);
        if (!others.empty()) {
          add(t + elapsed, others[rng_.below(others.size())]);
          const double d = std::max(0.15, rng_.gamma(4.0, b_.scan_dwell_mean / 4.0));
          elapsed += d;
          total += d;
        }
        excursion_done = true;
        continue;
      }
      add(t + elapsed, on_icon ? icon : param);
      elapsed += std::max(0.15, rng_.gamma(4.0, b_.aoi_fixation_mean / 4.0));
      on_icon = !on_icon;
    }
    acknowledged_[i] = true;
    // Scanning resumes with the panel after the CS drone.
    scan_drone_ = cs.drone_index;
    queue_.clear();
    return t + total;
  }

  const SessionScript& script_;
  const BehaviorParams& b_;
  Rng rng_;
  std::vector<double> capture_;
  std::vector<bool> acknowledged_;
  std::deque<int> queue_;
  int scan_drone_ = -1;
  std::vector<GazeTarget> targets_;
};

}  // namespace

std::vector<GazeTarget> plan_gaze_targets(const SessionScript& script, const BehaviorParams& behavior,
                                          std::uint64_t seed) {
  behavior.validate();
  return Planner(script, behavior, seed).run();
}

std::vector<gaze::GazeSample> simulate_gaze(const SessionScript& script, const BehaviorParams& behavior,
                                            std::uint64_t seed) {
  behavior.validate();
  std::vector<gaze::GazeSample> samples;
  if (!(script.duration > 0.0)) return samples;
  const auto targets = plan_gaze_targets(script, behavior, seed);
  Rng noise(derive_seed(seed, 13));
  const auto n = static_cast<long>(std::ceil(script.duration * behavior.sample_rate - 1e-9));
  samples.reserve(static_cast<std::size_t>(n));
  std::size_t idx = 0;
  for (long k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / behavior.sample_rate;
    while (idx + 1 < targets.size() && targets[idx + 1].arrival <= t) ++idx;
    const auto& cur = targets[idx];
    double x = cur.x;
    double y = cur.y;
    if (idx + 1 < targets.size()) {
      const auto& next = targets[idx + 1];
      const double s0 = std::max(cur.arrival, next.arrival - behavior.saccade_duration);
      if (t > s0) {
        const double f = (t - s0) / (next.arrival - s0);
        x += f * (next.x - cur.x);
        y += f * (next.y - cur.y);
      }
    }
    x += noise.normal(0.0, behavior.gaze_noise_sd);
    y += noise.normal(0.0, behavior.gaze_noise_sd);
    const bool inside = x >= 0 && y >= 0 && x < script.layout.canvas_width && y < script.layout.canvas_height;
    samples.push_back({t, inside ? x : 0.0, inside ? y : 0.0, inside});
  }
  return samples;
}

}  // namespace hism::sim
