#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hism/nn/params.hpp"

namespace hism::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <class T>
void adam_step(ParameterStore<T>& params, const Gradients<T>& grads, const AdamConfig& cfg) {
  ++params.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, params.step);
  const double c2 = 1.0 - std::pow(cfg.beta2, params.step);
  const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
  auto& entries = params.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& e = entries[i];
    const auto& g = grads.tensors[i];
    for (std::size_t k = 0; k < g.size(); ++k) {
      e.m[k] = b1 * e.m[k] + (T{1} - b1) * g[k];
      e.v[k] = b2 * e.v[k] + (T{1} - b2) * g[k] * g[k];
      const double mh = e.m[k] / c1;
      const double vh = e.v[k] / c2;
      e.value.data[k] -= static_cast<T>(cfg.learning_rate * mh / (std::sqrt(vh) + cfg.epsilon));
    }
  }
}

/// Mean squared error; writes d(loss)/d(pred) when grad is given.
template <class T>
T mse_loss(const std::vector<T>& pred, const std::vector<T>& target, std::vector<T>* grad) {
  const std::size_t n = pred.size();
  T loss = 0;
  if (grad) grad->assign(n, T{0});
  for (std::size_t i = 0; i < n; ++i) {
    const T d = pred[i] - target[i];
    loss += d * d;
    if (grad) (*grad)[i] = T{2} * d / static_cast<T>(n);
  }
  return n ? loss / static_cast<T>(n) : T{0};
}

/// Binary cross-entropy on a probability.
template <class T>
T bce_loss(T p, T label, T* grad) {
  const T eps = static_cast<T>(1e-7);
  const T q = std::clamp(p, eps, T{1} - eps);
  if (grad) *grad = (q - label) / (q * (T{1} - q));
  return -(label * std::log(q) + (T{1} - label) * std::log(T{1} - q));
}

}  // namespace hism::nn
