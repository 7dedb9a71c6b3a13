#include "hism/scene/layout.hpp"

#include <algorithm>
#include <cmath>

#include "hism/error.hpp"

namespace hism::scene {

Rect bounding_union(const Rect& a, const Rect& b) {
  const int x0 = std::min(a.x, b.x);
  const int y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.x + a.w, b.x + b.w);
  const int y1 = std::max(a.y + a.h, b.y + b.h);
  return {x0, y0, x1 - x0, y1 - y0};
}

std::vector<std::string> default_channels() {
  return {"battery", "altitude", "speed", "signal", "payload", "heading"};
}

int InterfaceLayout::channel_index(const std::string& channel) const {
  const auto it = std::find(channels.begin(), channels.end(), channel);
  if (it == channels.end()) throw Error(ErrorCode::unknown_element, "unknown channel '" + channel + "'");
  return static_cast<int>(it - channels.begin());
}

const Element& InterfaceLayout::icon(int drone, int channel) const {
  return element((drone * num_channels() + channel) * 2);
}

const Element& InterfaceLayout::parameter(int drone, int channel) const {
  return element((drone * num_channels() + channel) * 2 + 1);
}

const Element& InterfaceLayout::element(int id) const {
  if (id < 0 || id >= static_cast<int>(elements.size()))
    throw Error(ErrorCode::unknown_element, "element id " + std::to_string(id));
  return elements[static_cast<std::size_t>(id)];
}

Rect InterfaceLayout::aoi_rect(int drone, int channel) const {
  return bounding_union(icon(drone, channel).rect, parameter(drone, channel).rect);
}

namespace {

int grid_columns(int n) { return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))); }

}  // namespace

InterfaceLayout build_layout(int num_drones, const std::vector<std::string>& channels,
                             const LayoutConfig& config) {
  if (num_drones < 1) throw Error(ErrorCode::invalid_argument, "num_drones must be >= 1");
  if (channels.empty()) throw Error(ErrorCode::invalid_argument, "channel list is empty");
  for (std::size_t i = 0; i < channels.size(); ++i)
    for (std::size_t j = i + 1; j < channels.size(); ++j)
      if (channels[i] == channels[j]) throw Error(ErrorCode::invalid_argument, "duplicate channel " + channels[i]);

  const int panel_cols = grid_columns(num_drones);
  const int panel_rows = (num_drones + panel_cols - 1) / panel_cols;
  const int panel_w = config.canvas_width / panel_cols;
  const int panel_h = config.canvas_height / panel_rows;

  const int n_channels = static_cast<int>(channels.size());
  const int cell_cols = grid_columns(n_channels);
  const int cell_rows = (n_channels + cell_cols - 1) / cell_cols;
  const int cell_w = std::max(config.icon_size, config.param_width);
  const int cell_h = config.icon_size + config.param_gap + config.param_height;

  const int slot_w = (panel_w - 2 * config.min_margin) / cell_cols;
  const int slot_h = (panel_h - config.title_height - 2 * config.min_margin) / cell_rows;
  if (slot_w < cell_w + config.min_margin || slot_h < cell_h + config.min_margin)
    throw Error(ErrorCode::layout_overflow,
                std::to_string(num_drones) + " drones x " + std::to_string(n_channels) +
                    " channels do not fit a " + std::to_string(config.canvas_width) + "x" +
                    std::to_string(config.canvas_height) + " canvas");

  InterfaceLayout layout;
  layout.canvas_width = config.canvas_width;
  layout.canvas_height = config.canvas_height;
  layout.channels = channels;
  for (int d = 0; d < num_drones; ++d) {
    const Rect panel{(d % panel_cols) * panel_w, (d / panel_cols) * panel_h, panel_w, panel_h};
    layout.drones.push_back({d, panel});
    for (int c = 0; c < n_channels; ++c) {
      const int slot_x = panel.x + config.min_margin + (c % cell_cols) * slot_w;
      const int slot_y = panel.y + config.title_height + config.min_margin + (c / cell_cols) * slot_h;
      const int cx = slot_x + (slot_w - cell_w) / 2;
      const int cy = slot_y + (slot_h - cell_h) / 2;
      const Rect icon{cx + (cell_w - config.icon_size) / 2, cy, config.icon_size, config.icon_size};
      const Rect param{cx + (cell_w - config.param_width) / 2, cy + config.icon_size + config.param_gap,
                       config.param_width, config.param_height};
      const int base = static_cast<int>(layout.elements.size());
      layout.elements.push_back({base, d, ElementKind::icon, icon, channels[static_cast<std::size_t>(c)]});
      layout.elements.push_back({base + 1, d, ElementKind::parameter, param, channels[static_cast<std::size_t>(c)]});
    }
  }
  return layout;
}

std::optional<int> element_at(const InterfaceLayout& layout, double x, double y) {
  for (const auto& e : layout.elements)
    if (e.rect.contains(x, y)) return e.id;
  return std::nullopt;
}

namespace {

nlohmann::ordered_json rect_json(const Rect& r) { return {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}}; }

Rect rect_from(const nlohmann::json& j) {
  return {j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()};
}

}  // namespace

nlohmann::ordered_json to_json(const InterfaceLayout& layout) {
  nlohmann::ordered_json j;
  j["canvas_width"] = layout.canvas_width;
  j["canvas_height"] = layout.canvas_height;
  j["channels"] = layout.channels;
  auto& drones = j["drones"] = nlohmann::ordered_json::array();
  for (const auto& d : layout.drones) drones.push_back({{"drone_index", d.drone_index}, {"rect", rect_json(d.rect)}});
  auto& elements = j["elements"] = nlohmann::ordered_json::array();
  for (const auto& e : layout.elements) {
    elements.push_back({{"id", e.id},
                        {"drone_index", e.drone_index},
                        {"kind", e.kind == ElementKind::icon ? "icon" : "parameter"},
                        {"rect", rect_json(e.rect)},
                        {"channel", e.channel}});
  }
  return j;
}

InterfaceLayout layout_from_json(const nlohmann::json& j) {
  InterfaceLayout layout;
  layout.canvas_width = j.at("canvas_width").get<int>();
  layout.canvas_height = j.at("canvas_height").get<int>();
  layout.channels = j.at("channels").get<std::vector<std::string>>();
  for (const auto& d : j.at("drones")) layout.drones.push_back({d.at("drone_index").get<int>(), rect_from(d.at("rect"))});
  for (const auto& e : j.at("elements")) {
    const auto kind = e.at("kind").get<std::string>();
    if (kind != "icon" && kind != "parameter") throw Error(ErrorCode::parse_error, "element kind '" + kind + "'");
    layout.elements.push_back({e.at("id").get<int>(), e.at("drone_index").get<int>(),
                               kind == "icon" ? ElementKind::icon : ElementKind::parameter,
                               rect_from(e.at("rect")), e.at("channel").get<std::string>()});
  }
  for (std::size_t i = 0; i < layout.elements.size(); ++i)
    if (layout.elements[i].id != static_cast<int>(i))
      throw Error(ErrorCode::parse_error, "element ids must be dense and ordered");
  return layout;
}

}  // namespace hism::scene
