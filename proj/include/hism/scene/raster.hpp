#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hism/scene/layout.hpp"

namespace hism::scene {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB image.
struct FrameRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  FrameRaster() = default;
  FrameRaster(int w, int h, Rgb fill = {});

  Rgb at(int x, int y) const {
    const auto* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) {
    auto* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
  void fill_rect(const Rect& r, Rgb c);

  friend bool operator==(const FrameRaster&, const FrameRaster&) = default;
};

/// (w + 2 pad) x (h + 2 pad) window around rect; out-of-canvas pixels replicate the border.
FrameRaster crop_element(const FrameRaster& frame, const Rect& rect, int pad);

/// Area-averaging resize (box filter with fractional coverage).
FrameRaster resize_area(const FrameRaster& frame, int width, int height);

/// Per-pixel closeness to the highlight yellow: max(0, 1 - distance / 128), averaged.
double yellow_similarity(const FrameRaster& frame);

std::string encode_ppm(const FrameRaster& frame);
FrameRaster decode_ppm(const std::string& bytes);
void write_ppm(const std::filesystem::path& path, const FrameRaster& frame);
FrameRaster read_ppm(const std::filesystem::path& path);

}  // namespace hism::scene
