#include "hism/sim/events.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hism/error.hpp"

namespace hism::sim {

std::string format_events_jsonl(const EventLog& events) {
  std::string out;
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    j["t"] = e.t;
    j["type"] = e.type;
    for (const auto& [k, v] : e.payload.items()) j[k] = v;
    out += j.dump();
    out += '\n';
  }
  return out;
}

EventLog parse_events_jsonl(const std::string& text) {
  EventLog events;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fail = [&](const std::string& why) {
      return Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": " + why);
    };
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw fail("invalid JSON");
    }
    if (!j.is_object() || !j.contains("t") || !j["t"].is_number() || !j.contains("type") || !j["type"].is_string())
      throw fail("expected an object with numeric 't' and string 'type'");
    Event e;
    e.t = j["t"].get<double>();
    e.type = j["type"].get<std::string>();
    const auto& known = event_types();
    if (std::find(known.begin(), known.end(), e.type) == known.end()) throw fail("unknown event type '" + e.type + "'");
    if (!events.empty() && e.t < events.back().t) throw fail("timestamp goes backwards");
    for (const auto& [k, v] : j.items())
      if (k != "t" && k != "type") e.payload[k] = v;
    events.push_back(std::move(e));
  }
  return events;
}

void write_events(const std::filesystem::path& path, const EventLog& events) {
  std::ofstream out(path, std::ios::binary);
  const auto text = format_events_jsonl(events);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path.string());
}

EventLog read_events(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_events_jsonl(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

}  // namespace hism::sim
