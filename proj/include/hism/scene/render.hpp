#pragma once

#include <set>
#include <vector>

#include "hism/scene/layout.hpp"
#include "hism/scene/raster.hpp"

namespace hism::scene {

inline constexpr Rgb highlight_yellow{255, 210, 0};
inline constexpr Rgb background_color{30, 34, 40};
inline constexpr Rgb panel_color{48, 54, 62};
inline constexpr Rgb panel_border_color{70, 78, 90};
inline constexpr Rgb icon_color{86, 100, 122};
inline constexpr Rgb glyph_color{20, 24, 30};
inline constexpr Rgb value_color{220, 220, 220};
inline constexpr Rgb alert_color{230, 70, 60};

/// Drone state at one instant: values[drone][channel], plus channels in an
/// active critical situation (drawn in the alert color).
struct TelemetrySnapshot {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> alerts;
};

/// Set of highlighted element ids; only icons may appear.
struct HighlightState {
  std::set<int> highlighted;
  bool is_on(int id) const { return highlighted.count(id) != 0; }
};

FrameRaster render_frame(const InterfaceLayout& layout, const TelemetrySnapshot& telemetry,
                         const HighlightState& highlights);

}  // namespace hism::scene
