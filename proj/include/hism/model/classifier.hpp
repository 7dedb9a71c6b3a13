#pragma once

#include <cstdint>
#include <vector>

#include "hism/nn/layers.hpp"
#include "hism/nn/params.hpp"
#include "hism/scene/layout.hpp"

namespace hism::model {

/// conv-relu-conv-relu-pool-dense-sigmoid over [3 x size x size] crops.
std::vector<nn::LayerSpec> classifier_layers(int crop_size);

struct HighlightClassifier {
  int crop_size = 16;
  nn::Sequential<float> net;
  nn::ParameterStore<float> params;

  explicit HighlightClassifier(int crop_size = 16);
  void init(std::uint64_t seed);

  float score(const nn::Tensor<float>& crop) const;
  /// Bit k is 1 iff score(crop k) > 0.5.
  std::vector<std::uint8_t> highlight_vector(const std::vector<nn::Tensor<float>>& crops) const;
};

struct LabeledCrops {
  std::vector<nn::Tensor<float>> crops;
  std::vector<std::uint8_t> labels;
};

/// Icon crops from frames rendered with random telemetry and random highlight
/// sets, n per class, in shuffled order.
LabeledCrops make_icon_crops(const scene::InterfaceLayout& layout, int n_per_class, int crop_size,
                             int pad, std::uint64_t seed);

struct ClassifierTrainOptions {
  int max_epochs = 20;
  int batch = 16;
  double learning_rate = 2e-3;
  double holdout_fraction = 0.2;
  double target_accuracy = 0.99;
  std::uint64_t seed = 1;
};

struct ClassifierTrainResult {
  double holdout_accuracy = 0.0;
  int epochs = 0;
};

/// Binary cross-entropy with Adam until the held-out accuracy reaches the
/// target or the epoch cap. Throws ClassImbalance if a class is absent.
ClassifierTrainResult train_highlight_classifier(HighlightClassifier& clf, const LabeledCrops& data,
                                                 const ClassifierTrainOptions& opt);

double classifier_accuracy(const HighlightClassifier& clf, const LabeledCrops& data);

}  // namespace hism::model
