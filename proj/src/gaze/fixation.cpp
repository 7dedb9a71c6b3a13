#include "hism/gaze/fixation.hpp"

#include <algorithm>

#include "hism/error.hpp"

namespace hism::gaze {

namespace {

struct Extent {
  double min_x, max_x, min_y, max_y;
  explicit Extent(const GazeSample& s) : min_x(s.x), max_x(s.x), min_y(s.y), max_y(s.y) {}
  void add(const GazeSample& s) {
    min_x = std::min(min_x, s.x);
    max_x = std::max(max_x, s.x);
    min_y = std::min(min_y, s.y);
    max_y = std::max(max_y, s.y);
  }
  double dispersion() const { return (max_x - min_x) + (max_y - min_y); }
};

}  // namespace

std::vector<Fixation> detect_fixations_idt(std::span<const GazeSample> samples, const IdtParams& params) {
  if (!(params.dispersion_threshold > 0.0) || !(params.min_duration > 0.0))
    throw Error(ErrorCode::invalid_argument, "I-DT threshold and minimum duration must be positive");
  std::vector<Fixation> fixations;
  const std::size_t n = samples.size();
  std::size_t i = 0;
  while (i < n) {
    if (!samples[i].valid) {
      ++i;
      continue;
    }
    // Seed window [i, j] covering min_duration without invalid samples.
    Extent ext(samples[i]);
    std::size_t j = i;
    bool broken = false;
    while (samples[j].t - samples[i].t < params.min_duration) {
      if (j + 1 >= n) break;
      ++j;
      if (!samples[j].valid) {
        broken = true;
        break;
      }
      ext.add(samples[j]);
    }
    if (broken) {
      i = j + 1;
      continue;
    }
    if (samples[j].t - samples[i].t < params.min_duration) break;  // ran out of data
    if (ext.dispersion() > params.dispersion_threshold) {
      ++i;
      continue;
    }
    while (j + 1 < n && samples[j + 1].valid) {
      Extent grown = ext;
      grown.add(samples[j + 1]);
      if (grown.dispersion() > params.dispersion_threshold) break;
      ext = grown;
      ++j;
    }
    Fixation f;
    f.start = samples[i].t;
    f.end = samples[j].t;
    double sx = 0.0, sy = 0.0;
    for (std::size_t k = i; k <= j; ++k) {
      sx += samples[k].x;
      sy += samples[k].y;
    }
    f.sample_count = static_cast<int>(j - i + 1);
    f.x = sx / f.sample_count;
    f.y = sy / f.sample_count;
    fixations.push_back(f);
    i = j + 1;
  }
  return fixations;
}

}  // namespace hism::gaze
