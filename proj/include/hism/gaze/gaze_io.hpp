#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hism/gaze/types.hpp"

namespace hism::gaze {

/// gaze.csv: header `t_ms,x_px,y_px,valid`, one row per sample.
std::string format_gaze_csv(const std::vector<GazeSample>& samples);
std::vector<GazeSample> parse_gaze_csv(const std::string& text);

void write_gaze_csv(const std::filesystem::path& path, const std::vector<GazeSample>& samples);
std::vector<GazeSample> ingest_gaze_csv(const std::filesystem::path& path);

}  // namespace hism::gaze
