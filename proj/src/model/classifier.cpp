#include "hism/model/classifier.hpp"

#include <numeric>

#include "hism/error.hpp"
#include "hism/model/encode.hpp"
#include "hism/nn/optim.hpp"
#include "hism/random.hpp"
#include "hism/scene/render.hpp"
#include "hism/scene/channels.hpp"

namespace hism::model {

using nn::LayerSpec;

std::vector<LayerSpec> classifier_layers(int crop_size) {
  const int half = crop_size / 2;
  return {LayerSpec::conv2d(3, 8),  LayerSpec::relu(),    LayerSpec::conv2d(8, 8),
          LayerSpec::relu(),        LayerSpec::maxpool2(), LayerSpec::flatten(),
          LayerSpec::dense(8 * half * half, 1), LayerSpec::sigmoid()};
}

HighlightClassifier::HighlightClassifier(int size)
    : crop_size(size), net("classifier", classifier_layers(size)) {}

void HighlightClassifier::init(std::uint64_t seed) {
  params = {};
  Rng rng(derive_seed(seed, 0xC1A5));
  net.init_parameters(params, rng);
}

float HighlightClassifier::score(const nn::Tensor<float>& crop) const {
  const nn::Shape want{3, std::size_t(crop_size), std::size_t(crop_size)};
  if (crop.shape != want)
    throw Error(ErrorCode::shape_mismatch,
                "crop " + nn::shape_string(crop.shape) + ", classifier expects " + nn::shape_string(want));
  return net.forward(params, crop).data[0];
}

std::vector<std::uint8_t> HighlightClassifier::highlight_vector(const std::vector<nn::Tensor<float>>& crops) const {
  std::vector<std::uint8_t> bits;
  bits.reserve(crops.size());
  for (const auto& c : crops) bits.push_back(score(c) > 0.5f ? 1 : 0);
  return bits;
}

LabeledCrops make_icon_crops(const scene::InterfaceLayout& layout, int n_per_class, int crop_size,
                             int pad, std::uint64_t seed) {
  Rng rng(seed);
  const int D = layout.num_drones(), C = layout.num_channels();
  std::vector<std::pair<nn::Tensor<float>, std::uint8_t>> items;
  int have[2] = {0, 0};
  while (have[0] < n_per_class || have[1] < n_per_class) {
    scene::TelemetrySnapshot snap;
    snap.values.assign(D, std::vector<double>(C));
    snap.alerts.assign(D, std::vector<bool>(C, false));
    for (int d = 0; d < D; ++d)
      for (int c = 0; c < C; ++c) {
        const auto spec = scene::channel_spec(layout.channels[c]);
        snap.values[d][c] = scene::round_to_channel(spec, rng.uniform(spec.min, spec.max));
        snap.alerts[d][c] = rng.bernoulli(0.1);
      }
    scene::HighlightState hl;
    for (int d = 0; d < D; ++d)
      for (int c = 0; c < C; ++c)
        if (rng.bernoulli(0.15)) hl.highlighted.insert(layout.icon(d, c).id);
    const scene::FrameRaster frame = scene::render_frame(layout, snap, hl);
    for (int d = 0; d < D; ++d)
      for (int c = 0; c < C; ++c) {
        const auto& icon = layout.icon(d, c);
        const std::uint8_t label = hl.is_on(icon.id) ? 1 : 0;
        if (have[label] >= n_per_class) continue;
        // Plain icons are plentiful; keep a sample of them.
        if (!label && !rng.bernoulli(0.2)) continue;
        items.emplace_back(crop_tensor(frame, icon.rect, crop_size, pad), label);
        ++have[label];
      }
  }
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  LabeledCrops out;
  for (const auto i : order) {
    out.crops.push_back(std::move(items[i].first));
    out.labels.push_back(items[i].second);
  }
  return out;
}

double classifier_accuracy(const HighlightClassifier& clf, const LabeledCrops& data) {
  if (data.crops.empty()) return 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < data.crops.size(); ++i)
    ok += (clf.score(data.crops[i]) > 0.5f ? 1 : 0) == data.labels[i];
  return static_cast<double>(ok) / data.crops.size();
}

ClassifierTrainResult train_highlight_classifier(HighlightClassifier& clf, const LabeledCrops& data,
                                                 const ClassifierTrainOptions& opt) {
  const std::size_t n = data.crops.size();
  const auto positives = static_cast<std::size_t>(std::count(data.labels.begin(), data.labels.end(), 1));
  if (positives == 0 || positives == n)
    throw Error(ErrorCode::class_imbalance, "classifier training needs both highlighted and plain crops");
  Rng rng(derive_seed(opt.seed, 0xC1A6));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  const auto n_hold = static_cast<std::size_t>(std::max<double>(1.0, opt.holdout_fraction * n));
  LabeledCrops hold;
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_hold), order.end());
  for (std::size_t k = 0; k < n_hold; ++k) {
    hold.crops.push_back(data.crops[order[k]]);
    hold.labels.push_back(data.labels[order[k]]);
  }
  clf.init(opt.seed);
  const nn::AdamConfig adam{opt.learning_rate};
  ClassifierTrainResult res;
  for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
    rng.shuffle(train);
    for (std::size_t b0 = 0; b0 < train.size(); b0 += opt.batch) {
      const std::size_t b1 = std::min(train.size(), b0 + opt.batch);
      auto grads = clf.params.zero_gradients();
      for (std::size_t k = b0; k < b1; ++k) {
        const std::size_t i = train[k];
        nn::Tape<float> tape;
        const float p = clf.net.forward(clf.params, data.crops[i], &tape).data[0];
        float dp = 0;
        nn::bce_loss(p, static_cast<float>(data.labels[i]), &dp);
        clf.net.backward(clf.params, tape, nn::Tensor<float>({1}, dp / static_cast<float>(b1 - b0)), grads);
      }
      nn::adam_step(clf.params, grads, adam);
    }
    res.epochs = epoch;
    res.holdout_accuracy = classifier_accuracy(clf, hold);
    if (res.holdout_accuracy >= opt.target_accuracy) break;
  }
  return res;
}

}  // namespace hism::model
