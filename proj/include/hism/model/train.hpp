#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hism/model/dataset.hpp"
#include "hism/model/network.hpp"

namespace hism::model {

struct TrainOptions {
  int max_epochs = 12;
  int batch = 32;
  double learning_rate = 1e-3;
  int patience = 10;
  std::uint64_t seed = 1;
};

struct EpochRecord {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  nn::ParameterStore<float> params;  // best validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_mse = 0.0;
};

nn::Tensor<float> global_tensor(const TrainingExample& ex, const HismConfig& cfg);

float hism_predict(const HismNetwork<float>& net, const nn::ParameterStore<float>& params,
                   const TrainingExample& ex);

double mean_squared_error(const HismNetwork<float>& net, const nn::ParameterStore<float>& params,
                          const std::vector<TrainingExample>& examples);

/// Adam on MSE with per-example gradients summed in a fixed order, so results
/// do not depend on the thread count. Early-stops when the validation MSE has
/// not improved for `patience` epochs; an empty validation set falls back to
/// the training MSE. Throws EmptyDataset.
TrainResult hism_train(const HismConfig& cfg, const std::vector<TrainingExample>& train,
                       const std::vector<TrainingExample>& val, const TrainOptions& opt,
                       const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Prediction for every window of a session for the AOI containing element_id.
std::vector<double> hism_predict_series(SessionFeatures& features, const scene::InterfaceLayout& layout,
                                        int element_id, const HismNetwork<float>& net,
                                        const nn::ParameterStore<float>& params);

}  // namespace hism::model
