#include "hism/scene/render.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "hism/error.hpp"
#include "hism/scene/channels.hpp"

namespace hism::scene {

namespace {

// 3x5 block glyphs, one row per 3-bit mask (MSB = left column).
using Glyph = std::array<std::uint8_t, 5>;

Glyph glyph_for(char c) {
  switch (c) {
    case '0': return {7, 5, 5, 5, 7};
    case '1': return {2, 6, 2, 2, 7};
    case '2': return {7, 1, 7, 4, 7};
    case '3': return {7, 1, 7, 1, 7};
    case '4': return {5, 5, 7, 1, 1};
    case '5': return {7, 4, 7, 1, 7};
    case '6': return {7, 4, 7, 5, 7};
    case '7': return {7, 1, 1, 2, 2};
    case '8': return {7, 5, 7, 5, 7};
    case '9': return {7, 5, 7, 1, 7};
    case '.': return {0, 0, 0, 0, 2};
    case '-': return {0, 0, 7, 0, 0};
    default: return {0, 0, 0, 0, 0};
  }
}

void draw_text(FrameRaster& frame, const std::string& text, int x, int y, int scale, Rgb color) {
  for (const char c : text) {
    const Glyph g = glyph_for(c);
    for (int row = 0; row < 5; ++row)
      for (int col = 0; col < 3; ++col)
        if (g[static_cast<std::size_t>(row)] & (4 >> col))
          frame.fill_rect({x + col * scale, y + row * scale, scale, scale}, color);
    x += 4 * scale;
  }
}

std::string format_value(double value, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

// 5x5 symbol per channel index, drawn at scale 3 inside the icon (<= 225 px of 4096).
std::array<std::uint8_t, 5> symbol_for(int channel) {
  static constexpr std::array<std::array<std::uint8_t, 5>, 8> symbols{{
      {31, 17, 17, 17, 31},  // battery
      {4, 14, 31, 4, 4},     // altitude
      {1, 3, 7, 15, 31},     // speed
      {1, 5, 21, 21, 21},    // signal
      {14, 17, 31, 17, 31},  // payload
      {4, 4, 31, 4, 4},      // heading
      {21, 10, 21, 10, 21},
      {17, 10, 4, 10, 17},
  }};
  return symbols[static_cast<std::size_t>(channel) % symbols.size()];
}

}  // namespace

FrameRaster render_frame(const InterfaceLayout& layout, const TelemetrySnapshot& telemetry,
                         const HighlightState& highlights) {
  const int n_drones = layout.num_drones();
  const int n_channels = layout.num_channels();
  if (static_cast<int>(telemetry.values.size()) != n_drones)
    throw Error(ErrorCode::missing_telemetry, "telemetry covers " + std::to_string(telemetry.values.size()) +
                                                  " of " + std::to_string(n_drones) + " drones");
  for (int d = 0; d < n_drones; ++d)
    if (static_cast<int>(telemetry.values[static_cast<std::size_t>(d)].size()) != n_channels)
      throw Error(ErrorCode::missing_telemetry, "drone " + std::to_string(d) + " lacks channel values");
  for (const int id : highlights.highlighted)
    if (layout.element(id).kind != ElementKind::icon)
      throw Error(ErrorCode::invalid_argument, "element " + std::to_string(id) + " is not an icon");

  FrameRaster frame(layout.canvas_width, layout.canvas_height, background_color);
  for (const auto& panel : layout.drones) {
    const Rect r = panel.rect;
    frame.fill_rect({r.x + 4, r.y + 4, r.w - 8, r.h - 8}, panel_border_color);
    frame.fill_rect({r.x + 6, r.y + 6, r.w - 12, r.h - 12}, panel_color);
    draw_text(frame, std::to_string(panel.drone_index + 1), r.x + 16, r.y + 14, 3, value_color);
  }

  for (const auto& e : layout.elements) {
    const int c = layout.channel_index(e.channel);
    const auto d = static_cast<std::size_t>(e.drone_index);
    if (e.kind == ElementKind::icon) {
      frame.fill_rect(e.rect, highlights.is_on(e.id) ? highlight_yellow : icon_color);
      const auto sym = symbol_for(c);
      const int scale = 3;
      const int sx = e.rect.x + (e.rect.w - 5 * scale) / 2;
      const int sy = e.rect.y + (e.rect.h - 5 * scale) / 2;
      for (int row = 0; row < 5; ++row)
        for (int col = 0; col < 5; ++col)
          if (sym[static_cast<std::size_t>(row)] & (16 >> col))
            frame.fill_rect({sx + col * scale, sy + row * scale, scale, scale}, glyph_color);
    } else {
      frame.fill_rect(e.rect, glyph_color);
      const auto spec = channel_spec(e.channel);
      const double v = round_to_channel(spec, telemetry.values[d][static_cast<std::size_t>(c)]);
      const bool alert = d < telemetry.alerts.size() && static_cast<std::size_t>(c) < telemetry.alerts[d].size() &&
                         telemetry.alerts[d][static_cast<std::size_t>(c)];
      const std::string text = format_value(v, spec.decimals);
      const int scale = 3;
      const int text_w = static_cast<int>(text.size()) * 4 * scale - scale;
      const int tx = e.rect.x + std::max(1, (e.rect.w - text_w) / 2);
      const int ty = e.rect.y + (e.rect.h - 5 * scale) / 2;
      // Clip to the field so glyphs never leak into neighbouring elements.
      FrameRaster field(e.rect.w, e.rect.h, glyph_color);
      draw_text(field, text, tx - e.rect.x, ty - e.rect.y, scale, alert ? alert_color : value_color);
      for (int y = 0; y < e.rect.h; ++y)
        for (int x = 0; x < e.rect.w; ++x) frame.set(e.rect.x + x, e.rect.y + y, field.at(x, y));
    }
  }
  return frame;
}

}  // namespace hism::scene
