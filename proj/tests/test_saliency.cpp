#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "hism/error.hpp"
#include "hism/random.hpp"
#include "hism/saliency/series.hpp"

using namespace hism;
using namespace hism::saliency;
using gaze::GazeSample;

namespace {

// Independent oracle: linear scan of element rects and per-window tallies.
std::map<std::pair<int, int>, double> oracle_weights(const std::vector<GazeSample>& samples,
                                                     const scene::InterfaceLayout& layout, double width) {
  std::map<std::pair<int, int>, double> counts;
  std::map<int, double> totals;
  for (const auto& s : samples) {
    if (!s.valid) continue;
    const int w = static_cast<int>(std::floor(s.t / width));
    for (const auto& e : layout.elements)
      if (s.x >= e.rect.x && s.x < e.rect.x + e.rect.w && s.y >= e.rect.y && s.y < e.rect.y + e.rect.h) {
        counts[{w, e.id}] += 1;
        totals[w] += 1;
      }
  }
  for (auto& [key, v] : counts) v /= totals[key.first];
  return counts;
}

std::vector<GazeSample> random_gaze(const scene::InterfaceLayout& layout, Rng& rng, int n, double rate = 60.0) {
  std::vector<GazeSample> g;
  for (int k = 0; k < n; ++k) {
    GazeSample s{k / rate, 0, 0, rng.uniform() > 0.05};
    if (rng.uniform() < 0.7) {
      const auto& e = layout.elements[rng.below(layout.elements.size())];
      s.x = e.rect.x + rng.uniform() * e.rect.w;
      s.y = e.rect.y + rng.uniform() * e.rect.h;
    } else {
      s.x = rng.uniform() * layout.canvas_width;
      s.y = rng.uniform() * layout.canvas_height;
    }
    g.push_back(s);
  }
  return g;
}

}  // namespace

TEST_CASE("element saliency matches a brute-force tally") {
  const auto layout = scene::build_default_layout();
  Rng rng(3);
  const auto g = random_gaze(layout, rng, 3000);
  const auto s = element_saliency(g, layout, 0.5);
  const auto oracle = oracle_weights(g, layout, 0.5);
  REQUIRE(s.num_windows == static_cast<int>(std::floor(g.back().t / 0.5)) + 1);
  for (int w = 0; w < s.num_windows; ++w) {
    double sum = 0;
    for (int e = 0; e < s.num_elements; ++e) {
      const auto it = oracle.find({w, e});
      CHECK(s.at(w, e) == doctest::Approx(it == oracle.end() ? 0.0 : it->second).epsilon(1e-12));
      sum += s.at(w, e);
    }
    if (!s.is_masked(w)) CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("windows without on-element gaze are masked") {
  const auto layout = scene::build_default_layout();
  std::vector<GazeSample> g;
  const auto& icon = layout.elements[4].rect;
  for (int k = 0; k < 30; ++k) g.push_back({k / 60.0, icon.center_x(), icon.center_y(), true});
  for (int k = 30; k < 60; ++k) g.push_back({k / 60.0, 2, 2, true});  // background corner
  for (int k = 60; k < 90; ++k) g.push_back({k / 60.0, icon.center_x(), icon.center_y(), false});
  const auto s = element_saliency(g, layout, 0.5, 3);
  CHECK_FALSE(s.is_masked(0));
  CHECK(s.at(0, 4) == 1.0);
  CHECK(s.is_masked(1));
  CHECK(s.is_masked(2));
  for (int e = 0; e < s.num_elements; ++e) CHECK(s.at(1, e) == 0.0);
  CHECK_THROWS_AS(element_saliency(g, layout, 0.0), Error);
}

TEST_CASE("duplicating every sample leaves weights unchanged") {
  const auto layout = scene::build_default_layout();
  Rng rng(5);
  const auto g = random_gaze(layout, rng, 1200);
  std::vector<GazeSample> twice;
  for (const auto& s : g) {
    twice.push_back(s);
    twice.push_back(s);
  }
  const auto a = element_saliency(g, layout, 0.5);
  const auto b = element_saliency(twice, layout, 0.5);
  REQUIRE(a.num_windows == b.num_windows);
  CHECK(a.masked == b.masked);
  for (std::size_t i = 0; i < a.weights.size(); ++i) CHECK(a.weights[i] == doctest::Approx(b.weights[i]));
}

TEST_CASE("fixation-based weights split by overlap time") {
  const auto layout = scene::build_default_layout();
  const auto& a = layout.elements[0].rect;
  const auto& b = layout.elements[1].rect;
  const std::vector<gaze::Fixation> fx{{0.1, 0.3, a.center_x(), a.center_y(), 12},
                                       {0.3, 0.6, b.center_x(), b.center_y(), 18}};
  const auto s = element_saliency_from_fixations(fx, layout, 0.5, 2);
  CHECK(s.at(0, 0) == doctest::Approx(0.2 / 0.4));
  CHECK(s.at(0, 1) == doctest::Approx(0.2 / 0.4));
  CHECK(s.at(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("pooling averages non-masked contributors") {
  SaliencySeries a(0.5, 0.0, 2, 3), b(0.5, 0.0, 2, 3);
  a.at(0, 0) = 1.0;
  a.masked[0] = 0;
  b.at(0, 1) = 0.5;
  b.at(0, 2) = 0.5;
  b.masked[0] = 0;
  b.at(1, 2) = 1.0;
  b.masked[1] = 0;
  const std::vector<SaliencySeries> both{a, b};
  const auto p = pool_series(both);
  CHECK(p.at(0, 0) == doctest::Approx(0.5));
  CHECK(p.at(0, 1) == doctest::Approx(0.25));
  CHECK(p.at(1, 2) == doctest::Approx(1.0));
  CHECK_FALSE(p.is_masked(1));
  SaliencySeries c(0.25, 0.0, 2, 3);
  const std::vector<SaliencySeries> mixed{a, c};
  CHECK_THROWS_AS(pool_series(mixed), Error);
}

TEST_CASE("alignment puts the event window at relative time zero") {
  SaliencySeries s(0.5, 0.0, 40, 2);
  for (int w = 0; w < 40; ++w) {
    s.at(w, 0) = w;
    s.masked[w] = 0;
  }
  const auto a = align_to_event(s, 3.2, 5.0, 10.0);
  REQUIRE(a.num_windows == 30);
  CHECK(a.t0 == -5.0);
  CHECK(a.at(10, 0) == 6.0);  // window containing 3.2 s
  CHECK(a.is_masked(0));      // before the source start
  CHECK(a.at(4, 0) == 0.0);
  CHECK(a.at(29, 0) == 25.0);
  const auto late = align_to_event(s, 15.0, 5.0, 10.0);
  CHECK(late.is_masked(29));
  CHECK_THROWS_AS(align_to_event(s, 25.0, 5.0, 10.0), Error);
  const int ids[] = {0, 1};
  CHECK(extract_aoi_curve(a, ids).values[12] == 8.0);
  CHECK_THROWS_AS(extract_element_curve(a, 2), Error);
}

TEST_CASE("saliency csv round trip") {
  const auto layout = scene::build_default_layout();
  Rng rng(9);
  const auto s = element_saliency(random_gaze(layout, rng, 600), layout, 0.5);
  const auto path = std::filesystem::temp_directory_path() / "hism_test_saliency.csv";
  write_saliency_csv(path, s, "ground_truth");
  const auto back = read_saliency_csv(path);
  CHECK(back == s);
  std::filesystem::remove(path);
  CHECK(windows_for_duration(300.0, 0.5) == 600);
  CHECK(windows_for_duration(300.2, 0.5) == 601);
}
