#include "hism/sim/session_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hism/error.hpp"
#include "hism/io.hpp"
#include "hism/gaze/gaze_io.hpp"

namespace hism::sim {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::io_failure, "SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}


std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

Manifest build_manifest(const fs::path& dir) {
  Manifest m;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") files.push_back(entry.path());
  std::vector<std::string> rel;
  for (const auto& f : files) rel.push_back(fs::relative(f, dir).generic_string());
  std::sort(rel.begin(), rel.end());
  std::string lines;
  for (const auto& r : rel) {
    ManifestEntry e{r, sha256_file(dir / r), fs::file_size(dir / r)};
    lines += e.path + " " + e.sha256 + "\n";
    m.files.push_back(std::move(e));
  }
  m.digest = sha256_hex(lines);
  return m;
}

nlohmann::ordered_json to_json(const Manifest& m) {
  nlohmann::ordered_json j;
  auto& files = j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["digest"] = m.digest;
  return j;
}

std::string frame_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d.ppm", index);
  return buf;
}

Manifest write_session(const fs::path& dir, const SessionScript& script, const std::vector<gaze::GazeSample>& samples,
                       const EventLog& events, bool write_frames) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_failure, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "session.json", to_json(script).dump(1) + "\n");
  gaze::write_gaze_csv(dir / "gaze.csv", samples);
  write_events(dir / "events.jsonl", events);
  if (write_frames) {
    fs::create_directories(dir / "frames", ec);
    if (ec) throw Error(ErrorCode::io_failure, "cannot create frames directory: " + ec.message());
    for (int k = 0; k < script.frame_count(); ++k)
      scene::write_ppm(dir / "frames" / frame_file_name(k), script.render_at(k / script.frame_rate));
  }
  const auto manifest = build_manifest(dir);
  write_file(dir / "manifest.json", to_json(manifest).dump(1) + "\n");
  return manifest;
}

SessionScript read_session_script(const fs::path& dir) {
  const auto text = read_file(dir / "session.json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, (dir / "session.json").string() + ": " + e.what());
  }
  return script_from_json(j);
}

SessionData read_session(const fs::path& dir) {
  SessionData data;
  data.dir = dir;
  data.script = read_session_script(dir);
  data.gaze = gaze::ingest_gaze_csv(dir / "gaze.csv");
  if (fs::exists(dir / "events.jsonl")) data.events = read_events(dir / "events.jsonl");
  return data;
}

FrameSource::FrameSource(const SessionScript& script, std::optional<fs::path> frames_dir)
    : script_(&script), frames_dir_(std::move(frames_dir)) {}

FrameSource FrameSource::for_session(const fs::path& session_dir, const SessionScript& script) {
  const auto frames = session_dir / "frames";
  if (fs::is_directory(frames)) return FrameSource(script, frames);
  return FrameSource(script, std::nullopt);
}

scene::FrameRaster FrameSource::frame(int index) const {
  if (index < 0 || index >= frame_count())
    throw Error(ErrorCode::missing_frames, "frame " + std::to_string(index) + " outside the session");
  if (!frames_dir_) return script_->render_at(index / script_->frame_rate);
  const auto path = *frames_dir_ / frame_file_name(index);
  if (!fs::exists(path)) throw Error(ErrorCode::missing_frames, path.string());
  return scene::read_ppm(path);
}

}  // namespace hism::sim
