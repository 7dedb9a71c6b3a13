#include "hism/model/train.hpp"

#include <limits>
#include <numeric>

#include "hism/error.hpp"
#include "hism/model/encode.hpp"
#include "hism/nn/optim.hpp"

namespace hism::model {

nn::Tensor<float> global_tensor(const TrainingExample& ex, const HismConfig& cfg) {
  return stack_global(*ex.rgb, aoi_mask(ex.frame_w, ex.frame_h, ex.aoi, cfg.global_h, cfg.global_w),
                      cfg.global_h, cfg.global_w);
}

float hism_predict(const HismNetwork<float>& net, const nn::ParameterStore<float>& params,
                   const TrainingExample& ex) {
  return net.forward(params, global_tensor(ex, net.config()), ex.hvec);
}

double mean_squared_error(const HismNetwork<float>& net, const nn::ParameterStore<float>& params,
                          const std::vector<TrainingExample>& examples) {
  if (examples.empty()) return 0.0;
  std::vector<double> sq(examples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const double d = static_cast<double>(hism_predict(net, params, examples[i])) - examples[i].target;
    sq[i] = d * d;
  }
  return std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(examples.size());
}

TrainResult hism_train(const HismConfig& cfg, const std::vector<TrainingExample>& train,
                       const std::vector<TrainingExample>& val, const TrainOptions& opt,
                       const std::function<void(const EpochRecord&)>& on_epoch) {
  if (train.empty()) throw Error(ErrorCode::empty_dataset, "no training examples");
  if (opt.batch < 1 || opt.max_epochs < 1) throw Error(ErrorCode::invalid_argument, "batch and epochs must be >= 1");
  const HismNetwork<float> net(cfg);
  nn::ParameterStore<float> params = net.make_parameters(opt.seed);
  const nn::AdamConfig adam{opt.learning_rate};
  Rng rng(derive_seed(opt.seed, 0x7EA1));

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<nn::Gradients<float>> slots(static_cast<std::size_t>(opt.batch), params.zero_gradients());
  std::vector<double> losses(static_cast<std::size_t>(opt.batch));
  nn::Gradients<float> grads = params.zero_gradients();

  TrainResult res;
  res.best_val_mse = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += static_cast<std::size_t>(opt.batch)) {
      const std::size_t n = std::min(order.size() - b0, static_cast<std::size_t>(opt.batch));
      const float scale = 1.0f / static_cast<float>(n);
#pragma omp parallel for schedule(dynamic)
      for (std::size_t k = 0; k < n; ++k) {
        const TrainingExample& ex = train[order[b0 + k]];
        slots[k].zero();
        HismTape<float> tape;
        const float p = net.forward(params, global_tensor(ex, cfg), ex.hvec, &tape);
        const float d = p - ex.target;
        losses[k] = static_cast<double>(d) * d;
        net.backward(params, tape, 2.0f * d * scale, slots[k]);
      }
      grads.zero();
      for (std::size_t k = 0; k < n; ++k) {
        grads.add(slots[k]);
        loss_sum += losses[k];
      }
      nn::adam_step(params, grads, adam);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_mse = loss_sum / static_cast<double>(train.size());
    rec.val_mse = val.empty() ? rec.train_mse : mean_squared_error(net, params, val);
    res.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.val_mse < res.best_val_mse) {
      res.best_val_mse = rec.val_mse;
      res.best_epoch = epoch;
      res.params = params;
      since_best = 0;
    } else if (++since_best >= opt.patience) {
      break;
    }
  }
  return res;
}

std::vector<double> hism_predict_series(SessionFeatures& features, const scene::InterfaceLayout& layout,
                                        int element_id, const HismNetwork<float>& net,
                                        const nn::ParameterStore<float>& params) {
  const AoiRef aoi = aoi_for_element(layout, element_id);
  const HismConfig& cfg = net.config();
  const auto mask = aoi_mask(layout.canvas_width, layout.canvas_height, aoi.rect, cfg.global_h, cfg.global_w);
  std::vector<double> out(static_cast<std::size_t>(features.num_windows()));
  for (int w = 0; w < features.num_windows(); ++w) {
    const auto hv = features.hvec(w, aoi.icon_id);
    const auto rgb = features.rgb(w);
    out[static_cast<std::size_t>(w)] = net.forward(params, stack_global(*rgb, mask, cfg.global_h, cfg.global_w), hv);
  }
  return out;
}

}  // namespace hism::model
