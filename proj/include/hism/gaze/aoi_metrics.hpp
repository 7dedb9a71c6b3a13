#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hism/gaze/types.hpp"
#include "hism/scene/layout.hpp"

namespace hism::gaze {

enum class Condition { highlighted, plain };

struct AoiMetrics {
  int cs_id = 0;
  Condition condition = Condition::plain;
  int fixation_count = 0;
  double total_dwell = 0.0;
  std::optional<double> ttff;
  int revisits = 0;
  friend bool operator==(const AoiMetrics&, const AoiMetrics&) = default;
};

/// Window of interest for one critical situation.
struct AoiEvent {
  int cs_id = 0;
  double onset = 0.0;
  bool highlighted = false;
};

/// Fixations starting in [onset, onset + horizon] are considered; a fixation
/// is in the AOI when its centroid lies in `aoi`.
AoiMetrics aoi_metrics(std::span<const Fixation> fixations, const scene::Rect& aoi, const AoiEvent& event,
                       double horizon = 10.0);

}  // namespace hism::gaze
