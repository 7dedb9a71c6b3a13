#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hism/gaze/types.hpp"
#include "hism/scene/raster.hpp"
#include "hism/sim/events.hpp"
#include "hism/sim/session.hpp"

namespace hism::sim {

struct ManifestEntry {
  std::string path;  // relative to the session directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::vector<ManifestEntry> files;
  /// SHA-256 over "path sha256\n" lines of all entries.
  std::string digest;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

Manifest build_manifest(const std::filesystem::path& dir);
nlohmann::ordered_json to_json(const Manifest& m);

/// Writes session.json, gaze.csv, events.jsonl, optionally frames/, and
/// manifest.json into `dir` (created if needed).
Manifest write_session(const std::filesystem::path& dir, const SessionScript& script,
                       const std::vector<gaze::GazeSample>& samples, const EventLog& events, bool write_frames);

SessionScript read_session_script(const std::filesystem::path& dir);

struct SessionData {
  std::filesystem::path dir;
  SessionScript script;
  std::vector<gaze::GazeSample> gaze;
  EventLog events;
};

SessionData read_session(const std::filesystem::path& dir);

/// Frames of a session: read from frames/ when present, otherwise rendered
/// from the script (rendering is pure, so both routes give identical pixels).
class FrameSource {
 public:
  FrameSource(const SessionScript& script, std::optional<std::filesystem::path> frames_dir);
  static FrameSource for_session(const std::filesystem::path& session_dir, const SessionScript& script);

  double frame_rate() const { return script_->frame_rate; }
  int frame_count() const { return script_->frame_count(); }
  /// Throws MissingFrames if a frames directory exists but lacks the index.
  scene::FrameRaster frame(int index) const;

 private:
  const SessionScript* script_;
  std::optional<std::filesystem::path> frames_dir_;
};

std::string frame_file_name(int index);

}  // namespace hism::sim
