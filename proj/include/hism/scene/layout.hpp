#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hism::scene {

/// Half-open pixel rectangle: [x, x + w) x [y, y + h).
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool contains(double px, double py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  bool empty() const { return w <= 0 || h <= 0; }
  long area() const { return static_cast<long>(w) * h; }
  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }
  bool intersects(const Rect& o) const {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

Rect bounding_union(const Rect& a, const Rect& b);

enum class ElementKind { icon, parameter };

struct Element {
  int id = 0;
  int drone_index = 0;
  ElementKind kind = ElementKind::icon;
  Rect rect;
  std::string channel;
  friend bool operator==(const Element&, const Element&) = default;
};

struct DronePanel {
  int drone_index = 0;
  Rect rect;
  friend bool operator==(const DronePanel&, const DronePanel&) = default;
};

struct LayoutConfig {
  int canvas_width = 1280;
  int canvas_height = 800;
  int icon_size = 64;
  int param_width = 64;
  int param_height = 24;
  int param_gap = 4;
  int title_height = 40;
  int min_margin = 8;
};

struct InterfaceLayout {
  int canvas_width = 0;
  int canvas_height = 0;
  std::vector<std::string> channels;
  std::vector<DronePanel> drones;
  /// Drone-major, then channel, icon before its parameter.
  std::vector<Element> elements;

  int num_drones() const { return static_cast<int>(drones.size()); }
  int num_channels() const { return static_cast<int>(channels.size()); }
  int channel_index(const std::string& channel) const;
  const Element& icon(int drone, int channel) const;
  const Element& parameter(int drone, int channel) const;
  const Element& element(int id) const;
  /// Icon plus the parameter field below it.
  Rect aoi_rect(int drone, int channel) const;

  friend bool operator==(const InterfaceLayout&, const InterfaceLayout&) = default;
};

std::vector<std::string> default_channels();

InterfaceLayout build_layout(int num_drones, const std::vector<std::string>& channels,
                             const LayoutConfig& config);
inline InterfaceLayout build_default_layout(int num_drones = 4,
                                            const std::vector<std::string>& channels = default_channels()) {
  return build_layout(num_drones, channels, LayoutConfig{});
}

std::optional<int> element_at(const InterfaceLayout& layout, double x, double y);

nlohmann::ordered_json to_json(const InterfaceLayout& layout);
InterfaceLayout layout_from_json(const nlohmann::json& j);

}  // namespace hism::scene
