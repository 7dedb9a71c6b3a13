#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hism/error.hpp"
#include "hism/model/train.hpp"
#include "hism/scene/render.hpp"
#include "hism/sim/session.hpp"
#include "model_fixtures.hpp"

using namespace hism;
using namespace hism::model;

namespace {

const testing::TrainedClassifier& shared_classifier() {
  static const auto t = testing::trained_classifier(scene::build_default_layout(), 200, 3);
  return t;
}

scene::FrameRaster solid(int w, int h, scene::Rgb c) {
  scene::FrameRaster f(w, h);
  f.fill_rect({0, 0, w, h}, c);
  return f;
}

}  // namespace

TEST_CASE("aoi mask matches per-cell footprint overlap") {
  const scene::Rect aoi{100, 60, 70, 90};
  const int fw = 1280, fh = 800, h = 50, w = 80;
  const auto m = aoi_mask(fw, fh, aoi, h, w);
  // Oracle: cell (y, x) covers [x*16, (x+1)*16) x [y*16, (y+1)*16).
  double expected = 0, got = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const bool overlap = x * 16 < aoi.x + aoi.w && (x + 1) * 16 > aoi.x && y * 16 < aoi.y + aoi.h &&
                           (y + 1) * 16 > aoi.y;
      CHECK(m[static_cast<std::size_t>(y) * w + x] == (overlap ? 1.0f : 0.0f));
      expected += overlap;
      got += m[static_cast<std::size_t>(y) * w + x];
    }
  CHECK(got == expected);
  CHECK(expected == 5 * 7);
  CHECK_THROWS_AS(aoi_mask(fw, fh, scene::Rect{0, 0, 0, 5}, h, w), Error);
}

TEST_CASE("global encoding: rgb independent of the aoi, black frame gives zeros") {
  const auto layout = scene::build_default_layout();
  const auto s = sim::schedule_session({}, layout, 1);
  const auto frame = s.render_at(12.0);
  const auto a = encode_global(frame, layout.aoi_rect(0, 0), 50, 80);
  const auto b = encode_global(frame, layout.aoi_rect(3, 5), 50, 80);
  const std::size_t plane = 50 * 80;
  CHECK(std::equal(a.data.begin(), a.data.begin() + 3 * plane, b.data.begin()));
  CHECK_FALSE(std::equal(a.data.begin() + 3 * plane, a.data.end(), b.data.begin() + 3 * plane));

  const auto black = solid(1280, 800, {0, 0, 0});
  const auto z = encode_global(black, layout.aoi_rect(0, 0), 50, 80);
  for (std::size_t i = 0; i < 3 * plane; ++i) CHECK(z.data[i] == 0.0f);
  CHECK(std::equal(z.data.begin() + 3 * plane, z.data.end(), a.data.begin() + 3 * plane));

  // Area average of a two-colour frame: left half 255, right half 0 in red.
  auto half = solid(1280, 800, {0, 0, 0});
  half.fill_rect({0, 0, 640, 800}, {255, 0, 0});
  const auto rgb = downsample_rgb(half, 1, 2);
  CHECK(rgb[0] == 1.0f);
  CHECK(rgb[1] == 0.0f);
  const auto mid = downsample_rgb(half, 1, 3);
  CHECK(mid[1] == doctest::Approx((640.0 - 426.0 - 2.0 / 3.0) / (1280.0 / 3.0)).epsilon(1e-4));
}

TEST_CASE("history windows front-pad with window zero and middle frames") {
  CHECK(history_windows(2, 5) == std::vector<int>{0, 0, 0, 1, 2});
  CHECK(history_windows(9, 3) == std::vector<int>{7, 8, 9});
  CHECK(window_middle_frame(0, 0.5, 10.0) == 2);
  CHECK(window_middle_frame(7, 0.5, 10.0) == 37);
  const auto layout = scene::build_default_layout();
  const auto frame = solid(1280, 800, scene::icon_color);
  const auto seq = encode_local_sequence({frame, frame, frame}, layout.element(0).rect, 16, 4);
  REQUIRE(seq.size() == 3);
  CHECK(seq[0] == seq[2]);
}

TEST_CASE("classifier training reaches held-out accuracy and scores yellow high") {
  const auto& t = shared_classifier();
  CHECK(t.result.holdout_accuracy >= 0.99);
  const auto fresh = model::make_icon_crops(scene::build_default_layout(), 100, 16, 4, 99);
  CHECK(classifier_accuracy(t.clf, fresh) >= 0.99);
  const auto yellow = solid(64, 64, scene::highlight_yellow);
  CHECK(t.clf.score(crop_tensor(yellow, {0, 0, 64, 64}, 16, 0)) > 0.5f);
  const auto plain = solid(64, 64, scene::icon_color);
  CHECK(t.clf.score(crop_tensor(plain, {0, 0, 64, 64}, 16, 0)) < 0.5f);
  CHECK_THROWS_AS(t.clf.score(nn::Tensor<float>({3, 8, 8})), Error);
}

TEST_CASE("classifier training is deterministic and needs both classes") {
  const auto layout = scene::build_default_layout();
  const auto a = testing::trained_classifier(layout, 40, 8);
  const auto b = testing::trained_classifier(layout, 40, 8);
  for (std::size_t i = 0; i < a.clf.params.tensor_count(); ++i) CHECK(a.clf.params.value(i) == b.clf.params.value(i));
  auto one_class = make_icon_crops(layout, 20, 16, 4, 1);
  std::vector<nn::Tensor<float>> crops;
  for (std::size_t i = 0; i < one_class.crops.size(); ++i)
    if (one_class.labels[i]) crops.push_back(one_class.crops[i]);
  HighlightClassifier clf;
  clf.init(1);
  CHECK_THROWS_AS(
      train_highlight_classifier(clf, {crops, std::vector<std::uint8_t>(crops.size(), 1)}, ClassifierTrainOptions{}),
      Error);
}

TEST_CASE("highlight vector follows a scripted onset: 0000000111") {
  const auto layout = scene::build_default_layout();
  const auto s = sim::schedule_session({}, layout, 2);
  const auto& clf = shared_classifier().clf;
  const auto cfg = default_config();
  const sim::FrameSource frames(s, std::nullopt);
  SessionFeatures features(s, frames, cfg, clf);
  int tested = 0;
  for (const auto& cs : s.cs_list) {
    if (!cs.highlighted) continue;
    const int onset_w = static_cast<int>(std::llround(cs.onset_time / cfg.window_width));
    const auto bits = features.hvec(onset_w + 2, s.cs_icon_id(cs));
    CHECK(bits == std::vector<float>{0, 0, 0, 0, 0, 0, 0, 1, 1, 1});
    ++tested;
  }
  CHECK(tested > 0);
  // Strict threshold: a crop list scoring at most 0.5 gives zeros.
  HighlightClassifier zero;
  zero.init(1);
  for (auto& e : zero.params.entries()) std::fill(e.value.data.begin(), e.value.data.end(), 0.0f);
  const auto crop = crop_tensor(solid(64, 64, scene::highlight_yellow), {0, 0, 64, 64}, 16, 0);
  CHECK(zero.score(crop) == 0.5f);
  CHECK(zero.highlight_vector({crop, crop}) == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("highlight bits agree with the script on a whole session") {
  const auto s = sim::schedule_session({}, scene::build_default_layout(), 6);
  const auto a = testing::highlight_agreement(shared_classifier().clf, s);
  CHECK(a.checked > 1000);
  CHECK(a.mismatches == 0);
}

TEST_CASE("network: zero parameters give 0.5, outputs in (0,1), hvec matters") {
  const auto cfg = tiny_config();
  const HismNetwork<double> net(cfg);
  auto p = net.make_parameters(1);
  for (auto& e : p.entries()) std::fill(e.value.data.begin(), e.value.data.end(), 0.0);
  const nn::Tensor<double> g({4, 20, 32}, 0.3);
  CHECK(net.forward(p, g, std::vector<double>(4, 1.0)) == 0.5);
  CHECK_THROWS_AS(net.forward(p, g, std::vector<double>(3, 0.0)), Error);
  CHECK_THROWS_AS(net.forward(p, nn::Tensor<double>({4, 20, 31}), std::vector<double>(4, 0.0)), Error);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto q = net.make_parameters(seed);
    const double off = net.forward(q, g, {0, 0, 0, 0});
    const double on = net.forward(q, g, {0, 0, 1, 1});
    CHECK(off > 0.0);
    CHECK(off < 1.0);
    CHECK(off != on);
  }
}

TEST_CASE("tiny HISM full-graph gradient check") {
  const auto r = testing::tiny_hism_grad_check(1);
  INFO(r.worst_tensor << "[" << r.worst_index << "] a=" << r.analytic << " n=" << r.numeric);
  CHECK(r.checked == model::HismNetwork<double>(tiny_config()).make_parameters(1).parameter_count());
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("training on a constant target converges to it and is deterministic") {
  const auto cfg = tiny_config();
  Rng rng(4);
  std::vector<TrainingExample> train;
  for (int i = 0; i < 64; ++i) {
    TrainingExample ex;
    auto rgb = std::make_shared<std::vector<float>>(3 * 20 * 32);
    for (auto& v : *rgb) v = static_cast<float>(rng.uniform());
    ex.rgb = rgb;
    ex.frame_w = 1280;
    ex.frame_h = 800;
    ex.aoi = {static_cast<int>(rng.below(1000)), static_cast<int>(rng.below(600)), 64, 92};
    ex.hvec.resize(4);
    for (auto& b : ex.hvec) b = static_cast<float>(rng.below(2));
    ex.target = 0.3f;
    train.push_back(ex);
  }
  TrainOptions opt;
  opt.max_epochs = 60;
  opt.batch = 16;
  opt.learning_rate = 1e-2;
  opt.patience = 60;
  const auto r = hism_train(cfg, train, {}, opt);
  const HismNetwork<float> net(cfg);
  for (const auto& ex : train) CHECK(std::abs(hism_predict(net, r.params, ex) - 0.3f) <= 0.02f);
  const auto again = hism_train(cfg, train, {}, opt);
  REQUIRE(again.history.size() == r.history.size());
  for (std::size_t i = 0; i < r.history.size(); ++i) CHECK(again.history[i].train_mse == r.history[i].train_mse);
  CHECK_THROWS_AS(hism_train(cfg, {}, {}, opt), Error);
}

TEST_CASE("config json round trip and validation") {
  const auto c = default_config();
  CHECK(config_from_json(nlohmann::json::parse(to_json(c).dump())) == c);
  auto bad = c;
  bad.mlp_hidden = {64};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.history_len = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
