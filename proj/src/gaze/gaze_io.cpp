#include "hism/gaze/gaze_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hism/error.hpp"

namespace hism::gaze {

std::string format_gaze_csv(const std::vector<GazeSample>& samples) {
  std::string out = "t_ms,x_px,y_px,valid\n";
  out.reserve(samples.size() * 28 + out.size());
  char buf[96];
  for (const auto& s : samples) {
    const double t_ms = s.t * 1000.0;
    const int n = s.valid ? std::snprintf(buf, sizeof buf, "%.3f,%.2f,%.2f,1\n", t_ms, s.x, s.y)
                          : std::snprintf(buf, sizeof buf, "%.3f,,,0\n", t_ms);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

namespace {

bool parse_double(std::string_view field, double& out) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  if (field.empty()) return false;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc{} && res.ptr == field.data() + field.size() && std::isfinite(out);
}

}  // namespace

std::vector<GazeSample> parse_gaze_csv(const std::string& text) {
  std::vector<GazeSample> samples;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::parse_error, "line 1: missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_ms,x_px,y_px,valid")
    throw Error(ErrorCode::parse_error, "line 1: expected header t_ms,x_px,y_px,valid");
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    const auto fail = [&](const std::string& why) {
      return Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 4) throw fail("expected 4 fields");
    GazeSample s;
    double t_ms = 0.0;
    if (!parse_double(fields[0], t_ms)) throw fail("bad t_ms");
    double valid = 0.0;
    if (!parse_double(fields[3], valid) || (valid != 0.0 && valid != 1.0)) throw fail("valid must be 0 or 1");
    s.t = t_ms / 1000.0;
    s.valid = valid == 1.0;
    if (s.valid) {
      if (!parse_double(fields[1], s.x) || !parse_double(fields[2], s.y)) throw fail("bad coordinates");
    }
    if (!samples.empty() && s.t < samples.back().t)
      throw Error(ErrorCode::non_monotonic_time, "line " + std::to_string(line_no) + ": timestamp goes backwards");
    samples.push_back(s);
  }
  return samples;
}

void write_gaze_csv(const std::filesystem::path& path, const std::vector<GazeSample>& samples) {
  std::ofstream out(path, std::ios::binary);
  const auto text = format_gaze_csv(samples);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path.string());
}

std::vector<GazeSample> ingest_gaze_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_gaze_csv(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

}  // namespace hism::gaze
