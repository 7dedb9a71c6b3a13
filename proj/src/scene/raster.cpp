#include "hism/scene/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hism/error.hpp"
#include "hism/scene/render.hpp"

namespace hism::scene {

FrameRaster::FrameRaster(int w, int h, Rgb fill) : width(w), height(h) {
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

void FrameRaster::fill_rect(const Rect& r, Rgb c) {
  const int x0 = std::max(0, r.x);
  const int y0 = std::max(0, r.y);
  const int x1 = std::min(width, r.x + r.w);
  const int y1 = std::min(height, r.y + r.h);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) set(x, y, c);
}

FrameRaster crop_element(const FrameRaster& frame, const Rect& rect, int pad) {
  if (rect.empty()) throw Error(ErrorCode::empty_rect, "crop of an empty rect");
  if (pad < 0) throw Error(ErrorCode::invalid_argument, "negative crop padding");
  FrameRaster out(rect.w + 2 * pad, rect.h + 2 * pad);
  for (int y = 0; y < out.height; ++y) {
    const int sy = std::clamp(rect.y - pad + y, 0, frame.height - 1);
    for (int x = 0; x < out.width; ++x) {
      const int sx = std::clamp(rect.x - pad + x, 0, frame.width - 1);
      out.set(x, y, frame.at(sx, sy));
    }
  }
  return out;
}

namespace {

/// Source coverage of each output cell along one axis: (first index, weights).
struct AxisWeights {
  std::vector<int> first;
  std::vector<std::vector<double>> weights;
};

AxisWeights axis_weights(int src, int dst) {
  AxisWeights aw;
  const double scale = static_cast<double>(src) / dst;
  for (int o = 0; o < dst; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    const int i0 = static_cast<int>(std::floor(lo));
    const int i1 = std::min(src, static_cast<int>(std::ceil(hi)));
    std::vector<double> w;
    for (int i = i0; i < i1; ++i) w.push_back((std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i))) / scale);
    aw.first.push_back(i0);
    aw.weights.push_back(std::move(w));
  }
  return aw;
}

}  // namespace

FrameRaster resize_area(const FrameRaster& frame, int width, int height) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::empty_rect, "resize to an empty raster");
  const auto ax = axis_weights(frame.width, width);
  const auto ay = axis_weights(frame.height, height);
  FrameRaster out(width, height);
  for (int oy = 0; oy < height; ++oy) {
    for (int ox = 0; ox < width; ++ox) {
      double acc[3] = {0, 0, 0};
      for (std::size_t j = 0; j < ay.weights[oy].size(); ++j) {
        const int sy = ay.first[oy] + static_cast<int>(j);
        for (std::size_t i = 0; i < ax.weights[ox].size(); ++i) {
          const int sx = ax.first[ox] + static_cast<int>(i);
          const double w = ay.weights[oy][j] * ax.weights[ox][i];
          const Rgb c = frame.at(sx, sy);
          acc[0] += w * c.r;
          acc[1] += w * c.g;
          acc[2] += w * c.b;
        }
      }
      out.set(ox, oy,
              {static_cast<std::uint8_t>(std::lround(std::clamp(acc[0], 0.0, 255.0))),
               static_cast<std::uint8_t>(std::lround(std::clamp(acc[1], 0.0, 255.0))),
               static_cast<std::uint8_t>(std::lround(std::clamp(acc[2], 0.0, 255.0)))});
    }
  }
  return out;
}

double yellow_similarity(const FrameRaster& frame) {
  if (frame.width == 0 || frame.height == 0) return 0.0;
  double sum = 0.0;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      const Rgb c = frame.at(x, y);
      const double dr = c.r - static_cast<double>(highlight_yellow.r);
      const double dg = c.g - static_cast<double>(highlight_yellow.g);
      const double db = c.b - static_cast<double>(highlight_yellow.b);
      sum += std::max(0.0, 1.0 - std::sqrt(dr * dr + dg * dg + db * db) / 128.0);
    }
  }
  return sum / (static_cast<double>(frame.width) * frame.height);
}

std::string encode_ppm(const FrameRaster& frame) {
  std::string out = "P6\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(frame.pixels.data()), frame.pixels.size());
  return out;
}

FrameRaster decode_ppm(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (!in || magic != "P6" || w <= 0 || h <= 0 || maxval != 255)
    throw Error(ErrorCode::parse_error, "not a binary 8-bit PPM");
  in.get();
  FrameRaster frame(w, h);
  in.read(reinterpret_cast<char*>(frame.pixels.data()), static_cast<std::streamsize>(frame.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size()))
    throw Error(ErrorCode::parse_error, "truncated PPM payload");
  return frame;
}

void write_ppm(const std::filesystem::path& path, const FrameRaster& frame) {
  std::ofstream out(path, std::ios::binary);
  const auto bytes = encode_ppm(frame);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path.string());
}

FrameRaster read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_ppm(ss.str());
}

}  // namespace hism::scene
