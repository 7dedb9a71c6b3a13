#include "hism/model/encode.hpp"

#include <algorithm>
#include <cmath>

#include "hism/error.hpp"

namespace hism::model {

namespace {

struct Tap {
  int src;
  double weight;
};

// Source coverage of each output cell along one axis, weights summing to 1.
std::vector<std::vector<Tap>> box_taps(int src_n, int dst_n) {
  std::vector<std::vector<Tap>> taps(dst_n);
  const double scale = static_cast<double>(src_n) / dst_n;
  for (int d = 0; d < dst_n; ++d) {
    const double a = d * scale, b = (d + 1) * scale;
    for (int s = static_cast<int>(std::floor(a)); s < std::min(src_n, static_cast<int>(std::ceil(b))); ++s) {
      const double cover = std::min<double>(b, s + 1) - std::max<double>(a, s);
      if (cover > 0) taps[d].push_back({s, cover / scale});
    }
  }
  return taps;
}

}  // namespace

std::vector<float> downsample_rgb(const scene::FrameRaster& frame, int h, int w) {
  const auto tx = box_taps(frame.width, w);
  const auto ty = box_taps(frame.height, h);
  // Horizontal pass into double rows, then vertical.
  std::vector<double> rows(static_cast<std::size_t>(frame.height) * w * 3);
  for (int y = 0; y < frame.height; ++y) {
    const std::uint8_t* src = &frame.pixels[static_cast<std::size_t>(y) * frame.width * 3];
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (const Tap& t : tx[x])
        for (int c = 0; c < 3; ++c) acc[c] += t.weight * src[t.src * 3 + c];
      for (int c = 0; c < 3; ++c) rows[(static_cast<std::size_t>(c) * frame.height + y) * w + x] = acc[c];
    }
  }
  std::vector<float> out(static_cast<std::size_t>(3) * h * w);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0;
        for (const Tap& t : ty[y]) acc += t.weight * rows[(static_cast<std::size_t>(c) * frame.height + t.src) * w + x];
        out[(static_cast<std::size_t>(c) * h + y) * w + x] = static_cast<float>(acc / 255.0);
      }
  return out;
}

std::vector<float> aoi_mask(int frame_w, int frame_h, const scene::Rect& aoi, int h, int w) {
  const scene::Rect canvas{0, 0, frame_w, frame_h};
  if (aoi.empty() || !aoi.intersects(canvas)) throw Error(ErrorCode::empty_rect, "AOI outside frame");
  std::vector<float> mask(static_cast<std::size_t>(h) * w, 0.0f);
  const double sx = static_cast<double>(frame_w) / w, sy = static_cast<double>(frame_h) / h;
  for (int y = 0; y < h; ++y) {
    if (!((y + 1) * sy > aoi.y && y * sy < aoi.y + aoi.h)) continue;
    for (int x = 0; x < w; ++x)
      if ((x + 1) * sx > aoi.x && x * sx < aoi.x + aoi.w) mask[static_cast<std::size_t>(y) * w + x] = 1.0f;
  }
  return mask;
}

nn::Tensor<float> stack_global(const std::vector<float>& rgb, const std::vector<float>& mask, int h, int w) {
  nn::Tensor<float> t(nn::Shape{4, std::size_t(h), std::size_t(w)});
  std::copy(rgb.begin(), rgb.end(), t.data.begin());
  std::copy(mask.begin(), mask.end(), t.data.begin() + static_cast<std::ptrdiff_t>(rgb.size()));
  return t;
}

nn::Tensor<float> encode_global(const scene::FrameRaster& frame, const scene::Rect& aoi, int h, int w) {
  const auto mask = aoi_mask(frame.width, frame.height, aoi, h, w);
  return stack_global(downsample_rgb(frame, h, w), mask, h, w);
}

nn::Tensor<float> crop_tensor(const scene::FrameRaster& frame, const scene::Rect& rect, int size, int pad) {
  const scene::FrameRaster small = scene::resize_area(scene::crop_element(frame, rect, pad), size, size);
  nn::Tensor<float> t(nn::Shape{3, std::size_t(size), std::size_t(size)});
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const scene::Rgb p = small.at(x, y);
      t.data[(0 * size + y) * size + x] = p.r / 255.0f;
      t.data[(1 * size + y) * size + x] = p.g / 255.0f;
      t.data[(2 * size + y) * size + x] = p.b / 255.0f;
    }
  return t;
}

std::vector<nn::Tensor<float>> encode_local_sequence(const std::vector<scene::FrameRaster>& frames,
                                                     const scene::Rect& rect, int size, int pad) {
  std::vector<nn::Tensor<float>> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(crop_tensor(f, rect, size, pad));
  return out;
}

int window_middle_frame(int window, double window_width, double frame_rate) {
  return static_cast<int>(std::floor((window + 0.5) * window_width * frame_rate));
}

std::vector<int> history_windows(int window, int k) {
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) out[i] = std::max(0, window - k + 1 + i);
  return out;
}

}  // namespace hism::model
