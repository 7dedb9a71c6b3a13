#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hism::sim {

/// One line of events.jsonl: {"t": seconds, "type": ..., ...payload}.
struct Event {
  double t = 0.0;
  std::string type;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();
};

using EventLog = std::vector<Event>;

inline const std::vector<std::string>& event_types() {
  static const std::vector<std::string> types{"cs_onset", "cs_end",      "highlight_on", "highlight_off",
                                              "keypress", "probe_shown", "probe_answer"};
  return types;
}

std::string format_events_jsonl(const EventLog& events);
/// Throws ParseError naming the 1-based line on malformed input.
EventLog parse_events_jsonl(const std::string& text);

void write_events(const std::filesystem::path& path, const EventLog& events);
EventLog read_events(const std::filesystem::path& path);

}  // namespace hism::sim
