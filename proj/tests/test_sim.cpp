#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "hism/error.hpp"
#include "hism/gaze/fixation.hpp"
#include "hism/io.hpp"
#include "hism/scene/render.hpp"
#include "hism/sim/behavior.hpp"
#include "hism/sim/events.hpp"
#include "hism/sim/responses.hpp"
#include "hism/sim/session.hpp"
#include "hism/sim/session_io.hpp"

using namespace hism;
using namespace hism::sim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hism_test_sim_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("schedule respects count, grid, gaps and margins") {
  const auto layout = scene::build_default_layout();
  ScheduleParams p;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto s = schedule_session(p, layout, seed);
    REQUIRE(s.cs_list.size() == 10);
    for (std::size_t i = 0; i < s.cs_list.size(); ++i) {
      const auto& cs = s.cs_list[i];
      CHECK(cs.onset_time >= p.lead);
      CHECK(cs.onset_time <= p.duration - p.tail);
      CHECK(std::fmod(cs.onset_time, p.onset_grid) == 0.0);
      CHECK(cs.duration == p.cs_duration);
      if (i) CHECK(cs.onset_time - s.cs_list[i - 1].onset_time >= p.min_gap);
    }
    // A drone never has two overlapping critical situations.
    for (const auto& a : s.cs_list)
      for (const auto& b : s.cs_list)
        if (a.cs_id < b.cs_id && a.drone_index == b.drone_index) CHECK(b.onset_time >= a.end_time());
    CHECK(s.probes.size() == 3);
    for (const auto& q : s.probes) {
      for (const auto& cs : s.cs_list) CHECK(std::abs(q.pause_time - cs.onset_time) > 1.0);
      CHECK(q.options[q.correct_index] ==
            doctest::Approx(s.telemetry.value(q.drone_index, layout.channel_index(q.channel), q.pause_time)));
    }
  }
}

TEST_CASE("highlight probability extremes and seeded determinism") {
  const auto layout = scene::build_default_layout();
  ScheduleParams p;
  p.highlight_prob = 1.0;
  for (const auto& cs : schedule_session(p, layout, 4).cs_list) CHECK(cs.highlighted);
  p.highlight_prob = 0.0;
  for (const auto& cs : schedule_session(p, layout, 4).cs_list) CHECK_FALSE(cs.highlighted);
  p.highlight_prob = 0.5;
  CHECK(schedule_session(p, layout, 11) == schedule_session(p, layout, 11));
  CHECK_FALSE(schedule_session(p, layout, 11) == schedule_session(p, layout, 12));
  int on = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    for (const auto& cs : schedule_session(p, layout, seed).cs_list) {
      on += cs.highlighted;
      ++total;
    }
  CHECK(std::abs(static_cast<double>(on) / total - 0.5) < 0.05);
}

TEST_CASE("infeasible schedules are rejected") {
  ScheduleParams p;
  p.duration = 30;
  p.cs_rate = 20;
  CHECK_THROWS_AS(schedule_session(p, scene::build_default_layout(), 1), Error);
}

TEST_CASE("session script json round trip records the highlight probability") {
  ScheduleParams p;
  p.highlight_prob = 0.25;
  auto s = schedule_session(p, scene::build_default_layout(), 8);
  s.session_id = "session_0008";
  const auto j = to_json(s);
  CHECK(j["highlight_prob"] == 0.25);
  CHECK(script_from_json(nlohmann::json::parse(j.dump())) == s);
}

TEST_CASE("highlights follow the scripted critical situations") {
  const auto s = schedule_session({}, scene::build_default_layout(), 2);
  for (const auto& cs : s.cs_list) {
    const int icon = s.cs_icon_id(cs);
    CHECK(s.highlights_at(cs.onset_time).is_on(icon) == cs.highlighted);
    CHECK(s.highlights_at(cs.onset_time + 5).is_on(icon) == cs.highlighted);
    CHECK_FALSE(s.highlights_at(cs.onset_time - 0.05).is_on(icon));
    CHECK_FALSE(s.highlights_at(cs.end_time()).is_on(icon));
    CHECK(s.snapshot_at(cs.onset_time + 1).alerts[cs.drone_index][s.layout.channel_index(cs.channel)]);
  }
}

TEST_CASE("gaze samples sit on the 60 Hz grid and are deterministic") {
  ScheduleParams p;
  p.duration = 60;
  const auto s = schedule_session(p, scene::build_default_layout(), 3);
  const BehaviorParams b;
  const auto g = simulate_gaze(s, b, 17);
  REQUIRE(g.size() == static_cast<std::size_t>(std::ceil(60 * 60.0)));
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(g[k].t == doctest::Approx(k / 60.0));
  CHECK(g == simulate_gaze(s, b, 17));
  std::size_t valid = 0;
  for (const auto& x : g) valid += x.valid;
  CHECK(valid > g.size() * 9 / 10);
}

TEST_CASE("highlighted critical situations attract gaze faster on average") {
  const auto layout = scene::build_default_layout();
  double hl_sum = 0, pl_sum = 0;
  int hl_n = 0, pl_n = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto s = schedule_session({}, layout, seed);
    const auto targets = plan_gaze_targets(s, BehaviorParams{}, seed);
    for (const auto& cs : s.cs_list) {
      const auto aoi = s.cs_aoi(cs);
      const auto it = std::find_if(targets.begin(), targets.end(), [&](const GazeTarget& t) {
        return t.arrival >= cs.onset_time && aoi.contains(t.x, t.y);
      });
      if (it == targets.end()) continue;
      (cs.highlighted ? hl_sum : pl_sum) += it->arrival - cs.onset_time;
      ++(cs.highlighted ? hl_n : pl_n);
    }
  }
  REQUIRE(hl_n > 5);
  REQUIRE(pl_n > 5);
  CHECK(hl_sum / hl_n < pl_sum / pl_n);
}

TEST_CASE("behaviour parameters are validated") {
  BehaviorParams b;
  b.sample_rate = 0;
  CHECK_THROWS_AS(b.validate(), Error);
  CHECK(behavior_from_json(nlohmann::json::parse(to_json(BehaviorParams{}).dump())) == BehaviorParams{});
}

TEST_CASE("events jsonl round trip and line-numbered errors") {
  EventLog log{{1.0, "cs_onset", {{"cs_id", 0}}}, {1.5, "keypress", {{"key", "space"}}}};
  const auto text = format_events_jsonl(log);
  const auto back = parse_events_jsonl(text);
  REQUIRE(back.size() == 2);
  CHECK(back[1].type == "keypress");
  CHECK(format_events_jsonl(back) == text);
  try {
    parse_events_jsonl(text + "{not json\n");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    CHECK(e.message().find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_events_jsonl("{\"t\":1,\"type\":\"teleport\"}\n"), Error);
  CHECK_THROWS_AS(parse_events_jsonl("{\"t\":2,\"type\":\"keypress\"}\n{\"t\":1,\"type\":\"keypress\"}\n"), Error);
}

TEST_CASE("responses: onsets logged, keypresses follow AOI fixations, sorted") {
  const auto s = schedule_session({}, scene::build_default_layout(), 5);
  const auto g = simulate_gaze(s, BehaviorParams{}, 6);
  const auto events = simulate_responses(s, g, 7);
  CHECK(std::is_sorted(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; }));
  const auto count = [&](const std::string& type) {
    return std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.type == type; });
  };
  CHECK(count("cs_onset") == static_cast<long>(s.cs_list.size()));
  CHECK(count("probe_shown") == 3);
  CHECK(count("probe_answer") == 3);
  const auto fixations = gaze::detect_fixations_idt(g);
  for (const auto& e : events) {
    if (e.type != "keypress") continue;
    const auto& cs = s.cs_list[e.payload["cs_id"].get<int>()];
    const auto aoi = s.cs_aoi(cs);
    const bool preceded = std::any_of(fixations.begin(), fixations.end(), [&](const gaze::Fixation& f) {
      return cs.active_at(f.start) && aoi.contains(f.x, f.y) && e.t - f.start >= 0.3 - 1e-9 &&
             e.t - f.start <= 0.6 + 1e-9;
    });
    CHECK(preceded);
  }
}

TEST_CASE("session files round trip with a manifest") {
  ScheduleParams p;
  p.duration = 30;
  p.cs_rate = 4;
  auto s = schedule_session(p, scene::build_default_layout(), 9);
  s.session_id = "session_0009";
  const auto g = simulate_gaze(s, BehaviorParams{}, 1);
  const auto ev = simulate_responses(s, g, 2);
  const auto dir = fresh_dir("roundtrip");
  const auto m = write_session(dir, s, g, ev, true);
  CHECK(m.files.size() == 3 + static_cast<std::size_t>(s.frame_count()));
  for (const auto& f : m.files) CHECK(sha256_file(dir / f.path) == f.sha256);
  const auto back = read_session(dir);
  CHECK(back.script == s);
  CHECK(back.gaze.size() == g.size());
  CHECK(back.events.size() == ev.size());

  // Frames on disk equal on-demand renders; a missing file is reported.
  const auto with_frames = FrameSource::for_session(dir, back.script);
  const auto without = FrameSource(back.script, std::nullopt);
  CHECK(with_frames.frame(57) == without.frame(57));
  fs::remove(dir / "frames" / frame_file_name(12));
  CHECK_THROWS_AS(with_frames.frame(12), Error);

  // Rewriting the same session yields the same digest.
  const auto dir2 = fresh_dir("roundtrip2");
  CHECK(write_session(dir2, s, g, ev, false).digest == write_session(fresh_dir("roundtrip3"), s, g, ev, false).digest);
  fs::remove_all(dir);
  fs::remove_all(dir2);
  fs::remove_all(fresh_dir("roundtrip3"));
}

TEST_CASE("sha256 matches a published test vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
