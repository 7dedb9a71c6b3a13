#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hism::gaze {

struct GazeSample {
  double t = 0.0;  // seconds
  double x = 0.0;  // pixels
  double y = 0.0;
  bool valid = true;
  friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

struct Fixation {
  double start = 0.0;
  double end = 0.0;
  double x = 0.0;  // centroid
  double y = 0.0;
  int sample_count = 0;

  double duration() const { return end - start; }
  friend bool operator==(const Fixation&, const Fixation&) = default;
};

}  // namespace hism::gaze
