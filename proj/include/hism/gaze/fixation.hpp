#pragma once

#include <span>
#include <vector>

#include "hism/gaze/types.hpp"

namespace hism::gaze {

struct IdtParams {
  double dispersion_threshold = 60.0;  // (max x - min x) + (max y - min y), pixels
  double min_duration = 0.100;         // seconds
};

/// Dispersion-threshold identification. A window is seeded to span
/// min_duration, accepted if its dispersion is within the threshold, then
/// grown sample by sample until the threshold is exceeded. Invalid samples
/// terminate the current window.
std::vector<Fixation> detect_fixations_idt(std::span<const GazeSample> samples, const IdtParams& params = {});

}  // namespace hism::gaze
