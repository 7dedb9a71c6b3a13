#include "hism/gaze/aoi_metrics.hpp"

#include "hism/error.hpp"

namespace hism::gaze {

AoiMetrics aoi_metrics(std::span<const Fixation> fixations, const scene::Rect& aoi, const AoiEvent& event,
                       double horizon) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::invalid_argument, "analysis horizon must be positive");
  AoiMetrics m;
  m.cs_id = event.cs_id;
  m.condition = event.highlighted ? Condition::highlighted : Condition::plain;
  int entries = 0;
  bool previous_inside = false;
  for (const auto& f : fixations) {
    if (f.start < event.onset || f.start > event.onset + horizon) continue;
    const bool inside = aoi.contains(f.x, f.y);
    if (inside) {
      if (!m.ttff) m.ttff = f.start - event.onset;
      ++m.fixation_count;
      m.total_dwell += f.duration();
      if (!previous_inside) ++entries;
    }
    previous_inside = inside;
  }
  m.revisits = std::max(0, entries - 1);
  return m;
}

}  // namespace hism::gaze
