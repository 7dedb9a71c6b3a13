#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>

#include "hism/error.hpp"
#include "hism/eval/baselines.hpp"
#include "hism/eval/report.hpp"
#include "hism/io.hpp"
#include "hism/random.hpp"
#include "hism/scene/render.hpp"
#include "hism/sim/session.hpp"

using namespace hism;
using namespace hism::eval;

namespace {

scene::InterfaceLayout toy_layout(const std::vector<scene::Rect>& rects) {
  scene::InterfaceLayout l;
  l.canvas_width = 1280;
  l.canvas_height = 800;
  for (std::size_t i = 0; i < rects.size(); ++i) l.elements.push_back({static_cast<int>(i), 0, scene::ElementKind::icon, rects[i], "x"});
  return l;
}

// Midpoint-rule integration of the unnormalized Gaussian over a rect.
double brute_mass(const scene::Rect& r, double cx, double cy, double sigma) {
  double acc = 0;
  const int steps = 200;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      const double x = r.x + (i + 0.5) * r.w / steps, y = r.y + (j + 0.5) * r.h / steps;
      acc += std::exp(-0.5 * ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (sigma * sigma));
    }
  return acc * r.w * r.h / (steps * steps);
}

using cplx = std::complex<double>;

// Naive separable 2-D DFT; sign -1 forward, +1 backward (unnormalized).
std::vector<cplx> dft2(const std::vector<cplx>& in, int n, int sign) {
  std::vector<cplx> tmp(in.size()), out(in.size());
  for (int y = 0; y < n; ++y)
    for (int k = 0; k < n; ++k) {
      cplx acc = 0;
      for (int x = 0; x < n; ++x) acc += in[y * n + x] * std::polar(1.0, sign * 2 * std::numbers::pi * k * x / n);
      tmp[y * n + k] = acc;
    }
  for (int k = 0; k < n; ++k)
    for (int x = 0; x < n; ++x) {
      cplx acc = 0;
      for (int y = 0; y < n; ++y) acc += tmp[y * n + x] * std::polar(1.0, sign * 2 * std::numbers::pi * k * y / n);
      out[k * n + x] = acc;
    }
  return out;
}

// Spectral residual written from the textbook recipe on an n x n gray image.
std::vector<double> oracle_spectral(const std::vector<double>& gray, int n, double sigma) {
  std::vector<cplx> f = dft2(std::vector<cplx>(gray.begin(), gray.end()), n, -1);
  std::vector<double> la(f.size()), ph(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    la[i] = std::log(std::max(std::abs(f[i]), 1e-12));
    ph[i] = std::arg(f[i]);
  }
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      double m = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) m += la[((y + dy + n) % n) * n + (x + dx + n) % n];
      f[y * n + x] = std::polar(std::exp(la[y * n + x] - m / 9), ph[y * n + x]);
    }
  const auto back = dft2(f, n, +1);
  const int rad = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> out(gray.size());
  double wsum = 0;
  for (int dy = -rad; dy <= rad; ++dy)
    for (int dx = -rad; dx <= rad; ++dx) wsum += std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      double acc = 0;
      for (int dy = -rad; dy <= rad; ++dy)
        for (int dx = -rad; dx <= rad; ++dx) {
          const int yy = std::clamp(y + dy, 0, n - 1), xx = std::clamp(x + dx, 0, n - 1);
          acc += std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma)) * std::norm(back[yy * n + xx]);
        }
      out[y * n + x] = acc / wsum;
    }
  const double peak = *std::max_element(out.begin(), out.end());
  for (double& v : out) v /= peak;
  return out;
}

}  // namespace

TEST_CASE("center bias equals brute-force integration and is a simplex") {
  const auto layout = scene::build_default_layout();
  const auto w = center_bias_baseline(layout);
  double total = 0;
  std::vector<double> oracle;
  for (const auto& e : layout.elements) oracle.push_back(brute_mass(e.rect, 640, 400, 320));
  for (const double v : oracle) total += v;
  double sum = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(w[i] >= 0);
    CHECK(w[i] == doctest::Approx(oracle[i] / total).epsilon(1e-4));
    sum += w[i];
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("center bias toy layout: nearer element wins, ranking survives doubling areas") {
  // Two equal-area rects, one centred, one far off to the side.
  const auto small = toy_layout({{620, 390, 40, 20}, {100, 100, 40, 20}});
  const auto w = center_bias_baseline(small);
  const double a = brute_mass(small.elements[0].rect, 640, 400, 320);
  const double b = brute_mass(small.elements[1].rect, 640, 400, 320);
  CHECK(w[0] == doctest::Approx(a / (a + b)).epsilon(1e-5));
  CHECK(w[0] > w[1]);
  // Doubling each area symmetrically around its own centre.
  const auto big = toy_layout({{610, 385, 60, 30}, {90, 95, 60, 30}});
  const auto w2 = center_bias_baseline(big);
  const double a2 = brute_mass(big.elements[0].rect, 640, 400, 320);
  const double b2 = brute_mass(big.elements[1].rect, 640, 400, 320);
  CHECK(w2[0] == doctest::Approx(a2 / (a2 + b2)).epsilon(1e-5));
  CHECK(w2[0] > w2[1]);
}

TEST_CASE("spectral residual matches a naive DFT implementation") {
  Rng rng(2);
  const int n = 16;
  scene::FrameRaster f(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const auto v = static_cast<std::uint8_t>(rng.below(256));
      f.set(x, y, {v, static_cast<std::uint8_t>(255 - v), static_cast<std::uint8_t>(rng.below(256))});
    }
  std::vector<double> gray(n * n, 0.0);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const auto p = f.at(x, y);
      gray[(y / 4) * n + x / 4] += (0.299 * p.r + 0.587 * p.g + 0.114 * p.b) / 255.0 / 16.0;
    }
  const auto expected = oracle_spectral(gray, n, 1.0);
  const auto map = spectral_residual_saliency(f, {n, 1.0});
  REQUIRE(map.values.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(map.values[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("flat frame gives a zero map and uniform weights") {
  const auto layout = scene::build_default_layout();
  scene::FrameRaster gray(1280, 800);
  gray.fill_rect({0, 0, 1280, 800}, {128, 128, 128});
  const auto map = spectral_residual_saliency(gray);
  for (const double v : map.values) CHECK(v == 0.0);
  for (const double v : normalize_over_elements(map, layout)) CHECK(v == doctest::Approx(1.0 / 48));
}

TEST_CASE("a highlighted icon carries the largest spectral weight among icons") {
  const auto layout = scene::build_default_layout();
  const auto s = sim::schedule_session({}, layout, 1);
  auto snap = s.snapshot_at(2.0);
  scene::HighlightState hl;
  const int icon = layout.icon(1, 2).id;
  hl.highlighted.insert(icon);
  const auto frame = scene::render_frame(layout, snap, hl);
  const auto w = normalize_over_elements(spectral_residual_saliency(frame), layout);
  double sum = 0;
  int best = -1;
  for (const auto& e : layout.elements) {
    sum += w[e.id];
    if (e.kind == scene::ElementKind::icon && (best < 0 || w[e.id] > w[best])) best = e.id;
  }
  CHECK(best == icon);
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("element pooling is an area-weighted footprint mean") {
  const auto layout = toy_layout({{0, 0, 640, 400}, {640, 0, 320, 400}});
  SaliencyMap map{4, 2, {1, 1, 3, 0, 0, 0, 0, 0}};
  const auto w = normalize_over_elements(map, layout);
  // Element 0 covers cells (0,0),(1,0) -> mean 1; element 1 covers (2,0) -> 3.
  CHECK(w[0] == doctest::Approx(0.25));
  CHECK(w[1] == doctest::Approx(0.75));
}

TEST_CASE("masked MSE closed forms") {
  const std::vector<double> gt{0, 1, 0, 1, 0.3};
  const std::vector<std::uint8_t> mask{0, 0, 0, 0, 1};
  std::size_t n = 0;
  CHECK(masked_mse(gt, gt, mask, &n) == 0.0);
  CHECK(n == 4);
  const std::vector<double> half(5, 0.5);
  CHECK(masked_mse(half, gt, mask) == 0.25);
  CHECK(masked_mse(gt, half, mask) == masked_mse(half, gt, mask));
  CHECK(masked_mse(half, gt, std::vector<std::uint8_t>(5, 1), &n) == 0.0);
  CHECK(n == 0);
  CHECK_THROWS_AS(masked_mse(std::vector<double>(4), gt, mask), Error);
}

namespace {

std::vector<CsTrace> toy_traces() {
  std::vector<CsTrace> t;
  for (int i = 0; i < 4; ++i) {
    CsTrace c;
    c.session_id = i < 2 ? "session_0001" : "session_0002";
    c.cs_id = i;
    c.highlighted = i % 2 == 0;
    c.ground_truth = {0.1, 0.2 + i * 0.1, 0.5, 0.0};
    c.masked = {0, 0, 0, static_cast<std::uint8_t>(i == 0)};
    c.predictions["flat"] = std::vector<double>(4, 0.2);
    c.predictions["good"] = c.ground_truth;
    t.push_back(c);
  }
  return t;
}

}  // namespace

TEST_CASE("evaluation pools MSE and builds flat curves for static predictions") {
  const auto traces = toy_traces();
  const auto r = evaluate(traces, {"flat", "good"}, 1.0, 0.5);
  CHECK(r.rel_time == std::vector<double>{-1.0, -0.5, 0.0, 0.5});
  CHECK(r.window_count == 15);
  CHECK(r.mse("good") == 0.0);
  double sq = 0;
  for (const auto& t : traces)
    for (std::size_t k = 0; k < 4; ++k)
      if (!t.masked[k]) sq += (0.2 - t.ground_truth[k]) * (0.2 - t.ground_truth[k]);
  CHECK(r.mse("flat") == doctest::Approx(sq / 15));
  CHECK(r.highlighted.events == 2);
  const auto& flat = r.highlighted.curves.at("flat");
  for (const double v : flat) CHECK(v == doctest::Approx(0.2));
  // Ground-truth mean skips masked entries: only trace 2 is unmasked at k=3.
  CHECK(r.highlighted.curves.at("ground_truth")[3] == 0.0);
  CHECK(r.highlighted.curves.at("ground_truth")[1] == doctest::Approx((0.2 + 0.4) / 2));
  CHECK(r.test_sessions == std::vector<std::string>{"session_0001", "session_0002"});
  CHECK_THROWS_AS(evaluate(traces, {"missing"}, 1.0, 0.5), Error);
}

TEST_CASE("export is deterministic and curves include ground truth") {
  const auto traces = toy_traces();
  const auto r = evaluate(traces, {"flat", "good"}, 1.0, 0.5);
  const auto csv = format_curves_csv(r);
  CHECK(csv.rfind("rel_time_s,model,mean_saliency\n", 0) == 0);
  CHECK(csv.find("\n-1.00,ground_truth,") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 4);
  const auto preds = format_predictions_csv(traces, r.models, 1.0, 0.5);
  CHECK(std::count(preds.begin(), preds.end(), '\n') == 1 + 4 * 4);

  const auto base = std::filesystem::temp_directory_path();
  const auto a = base / "hism_test_eval_a", b = base / "hism_test_eval_b";
  for (const auto& d : {a, b}) {
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    export_report(r, d, &traces);
  }
  for (const char* f : {"report.json", "curves.csv", "predictions.csv"}) CHECK(read_file(a / f) == read_file(b / f));
  const auto j = nlohmann::json::parse(read_file(a / "report.json"));
  CHECK(j["schema"] == "hism.report/1");
  CHECK(j["highlighted"]["curves"].contains("ground_truth"));
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}
