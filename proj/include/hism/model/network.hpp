#pragma once

#include <cstdint>
#include <vector>

#include "hism/model/config.hpp"
#include "hism/nn/layers.hpp"
#include "hism/nn/params.hpp"
#include "hism/random.hpp"

namespace hism::model {

template <class T>
struct HismTape {
  nn::Tape<T> backbone;
  nn::Tape<T> lstm;
  nn::Tape<T> mlp;

  std::vector<std::uint32_t> kink_signature() const {
    auto s = backbone.kink_signature();
    for (const auto* t : {&lstm, &mlp}) {
      const auto more = t->kink_signature();
      s.insert(s.end(), more.begin(), more.end());
    }
    return s;
  }
};

/// backbone(global) ++ lstm(hvec as [K x 1]) -> 3-layer MLP -> sigmoid.
template <class T>
class HismNetwork {
 public:
  explicit HismNetwork(const HismConfig& cfg)
      : cfg_(cfg),
        backbone_("backbone", cfg.backbone),
        lstm_("lstm", cfg.lstm_layers_spec()),
        mlp_("mlp", cfg.mlp_spec()) {
    cfg.validate();
  }

  const HismConfig& config() const { return cfg_; }

  void init_parameters(nn::ParameterStore<T>& params, std::uint64_t seed) const {
    Rng rng(derive_seed(seed, 0x4153));
    backbone_.init_parameters(params, rng);
    lstm_.init_parameters(params, rng);
    mlp_.init_parameters(params, rng);
  }

  nn::ParameterStore<T> make_parameters(std::uint64_t seed) const {
    nn::ParameterStore<T> p;
    init_parameters(p, seed);
    return p;
  }

  T forward(const nn::ParameterStore<T>& params, const nn::Tensor<T>& global,
            const std::vector<T>& hvec, HismTape<T>* tape = nullptr) const {
    if (hvec.size() != static_cast<std::size_t>(cfg_.history_len))
      throw Error(ErrorCode::shape_mismatch, "highlight vector has " + std::to_string(hvec.size()) +
                                                 " bits, expected " + std::to_string(cfg_.history_len));
    const nn::Tensor<T> spatial = backbone_.forward(params, global, tape ? &tape->backbone : nullptr);
    const nn::Tensor<T> seq(nn::Shape{hvec.size(), 1}, hvec);
    const nn::Tensor<T> temporal = lstm_.forward(params, seq, tape ? &tape->lstm : nullptr);
    nn::Tensor<T> feat(nn::Shape{spatial.size() + temporal.size()});
    std::copy(spatial.data.begin(), spatial.data.end(), feat.data.begin());
    std::copy(temporal.data.begin(), temporal.data.end(),
              feat.data.begin() + static_cast<std::ptrdiff_t>(spatial.size()));
    return mlp_.forward(params, feat, tape ? &tape->mlp : nullptr).data[0];
  }

  /// Accumulates d(loss)/d(params) given d(loss)/d(output).
  void backward(const nn::ParameterStore<T>& params, const HismTape<T>& tape, T grad_out,
                nn::Gradients<T>& grads) const {
    const nn::Tensor<T> gfeat = mlp_.backward(params, tape.mlp, nn::Tensor<T>({1}, grad_out), grads);
    const std::size_t sd = static_cast<std::size_t>(cfg_.spatial_dim);
    nn::Tensor<T> gs(nn::Shape{sd}, std::vector<T>(gfeat.data.begin(), gfeat.data.begin() + sd));
    nn::Tensor<T> gt(nn::Shape{gfeat.size() - sd}, std::vector<T>(gfeat.data.begin() + sd, gfeat.data.end()));
    lstm_.backward(params, tape.lstm, gt, grads);
    backbone_.backward(params, tape.backbone, gs, grads);
  }

 private:
  HismConfig cfg_;
  nn::Sequential<T> backbone_;
  nn::Sequential<T> lstm_;
  nn::Sequential<T> mlp_;
};

}  // namespace hism::model
