#include "hism/eval/baselines.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "hism/error.hpp"

namespace hism::eval {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<double> simplex_or_uniform(std::vector<double> w) {
  double sum = 0;
  for (const double v : w) sum += v;
  if (!(sum > 0) || !std::isfinite(sum)) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  for (double& v : w) v /= sum;
  return w;
}

// FFTW planning is not thread safe.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

void fft2(std::vector<std::complex<double>>& data, int n, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_2d(n, n, p, p, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_mutex());
  fftw_destroy_plan(plan);
}

std::vector<double> gaussian_blur(const std::vector<double>& in, int n, double sigma) {
  const int radius = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> k(2 * radius + 1);
  double ks = 0;
  for (int i = -radius; i <= radius; ++i) ks += k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& v : k) v /= ks;
  auto clampi = [n](int i) { return std::clamp(i, 0, n - 1); };
  std::vector<double> tmp(in.size()), out(in.size());
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      double acc = 0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * in[y * n + clampi(x + i)];
      tmp[y * n + x] = acc;
    }
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      double acc = 0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp[clampi(y + i) * n + x];
      out[y * n + x] = acc;
    }
  return out;
}

}  // namespace

std::vector<double> center_bias_baseline(const scene::InterfaceLayout& layout, double sigma_fraction) {
  const double cx = layout.canvas_width / 2.0, cy = layout.canvas_height / 2.0;
  const double sigma = layout.canvas_width * sigma_fraction;
  std::vector<double> w;
  w.reserve(layout.elements.size());
  for (const auto& e : layout.elements) {
    const auto& r = e.rect;
    const double mx = normal_cdf((r.x + r.w - cx) / sigma) - normal_cdf((r.x - cx) / sigma);
    const double my = normal_cdf((r.y + r.h - cy) / sigma) - normal_cdf((r.y - cy) / sigma);
    w.push_back(mx * my);
  }
  return simplex_or_uniform(std::move(w));
}

SaliencyMap spectral_residual_saliency(const scene::FrameRaster& frame, const SpectralParams& params) {
  const int n = params.size;
  // Area-averaged grayscale at n x n.
  std::vector<double> gray(static_cast<std::size_t>(n) * n, 0.0);
  const double sx = static_cast<double>(frame.width) / n, sy = static_cast<double>(frame.height) / n;
  for (int y = 0; y < frame.height; ++y) {
    const int gy = std::min(n - 1, static_cast<int>(y / sy));
    for (int x = 0; x < frame.width; ++x) {
      const int gx = std::min(n - 1, static_cast<int>(x / sx));
      const scene::Rgb p = frame.at(x, y);
      gray[gy * n + gx] += (0.299 * p.r + 0.587 * p.g + 0.114 * p.b) / 255.0;
    }
  }
  // Integer cell sizes differ by at most one pixel; divide by actual counts.
  std::vector<int> cx(n, 0), cy(n, 0);
  for (int x = 0; x < frame.width; ++x) ++cx[std::min(n - 1, static_cast<int>(x / sx))];
  for (int y = 0; y < frame.height; ++y) ++cy[std::min(n - 1, static_cast<int>(y / sy))];
  double lo = 1e300, hi = -1e300;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      double& g = gray[y * n + x];
      g /= static_cast<double>(cx[x]) * cy[y];
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
  SaliencyMap map{n, n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  if (hi - lo < 1e-12) return map;

  std::vector<std::complex<double>> spec(gray.begin(), gray.end());
  fft2(spec, n, FFTW_FORWARD);
  std::vector<double> logamp(spec.size()), phase(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    logamp[i] = std::log(std::max(std::abs(spec[i]), 1e-12));
    phase[i] = std::arg(spec[i]);
  }
  // Residual against a 3x3 mean of the (periodic) log spectrum.
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      double avg = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) avg += logamp[((y + dy + n) % n) * n + (x + dx + n) % n];
      const double r = logamp[y * n + x] - avg / 9.0;
      spec[y * n + x] = std::polar(std::exp(r), phase[y * n + x]);
    }
  fft2(spec, n, FFTW_BACKWARD);
  std::vector<double> power(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) power[i] = std::norm(spec[i]);
  map.values = gaussian_blur(power, n, params.blur_sigma);
  const double peak = *std::max_element(map.values.begin(), map.values.end());
  if (peak > 0)
    for (double& v : map.values) v /= peak;
  return map;
}

std::vector<double> normalize_over_elements(const SaliencyMap& map, const scene::InterfaceLayout& layout) {
  const double sx = static_cast<double>(layout.canvas_width) / map.width;
  const double sy = static_cast<double>(layout.canvas_height) / map.height;
  std::vector<double> w;
  w.reserve(layout.elements.size());
  for (const auto& e : layout.elements) {
    const auto& r = e.rect;
    double acc = 0, area = 0;
    const int x0 = static_cast<int>(std::floor(r.x / sx)), x1 = static_cast<int>(std::ceil((r.x + r.w) / sx));
    const int y0 = static_cast<int>(std::floor(r.y / sy)), y1 = static_cast<int>(std::ceil((r.y + r.h) / sy));
    for (int my = std::max(0, y0); my < std::min(map.height, y1); ++my) {
      const double oy = std::min<double>(r.y + r.h, (my + 1) * sy) - std::max<double>(r.y, my * sy);
      if (oy <= 0) continue;
      for (int mx = std::max(0, x0); mx < std::min(map.width, x1); ++mx) {
        const double ox = std::min<double>(r.x + r.w, (mx + 1) * sx) - std::max<double>(r.x, mx * sx);
        if (ox <= 0) continue;
        acc += ox * oy * map.values[static_cast<std::size_t>(my) * map.width + mx];
        area += ox * oy;
      }
    }
    w.push_back(area > 0 ? acc / area : 0.0);
  }
  return simplex_or_uniform(std::move(w));
}

}  // namespace hism::eval
