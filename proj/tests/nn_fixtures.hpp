#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hism/nn/grad_check.hpp"
#include "hism/nn/layers.hpp"
#include "hism/random.hpp"

namespace hism::testing {

struct StackCase {
  nn::Sequential<double> net;
  nn::Shape input_shape;
  std::string label;
};

/// Shape case k of a fixed family: conv stacks with pooling, dense chains and
/// stacked LSTMs with varying sizes.
inline StackCase random_stack(std::uint64_t k) {
  using nn::LayerSpec;
  Rng rng(derive_seed(0x5eed, k));
  const auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); };
  switch (k % 3) {
    case 0: {
      const int c = pick(1, 3), h = 2 * pick(2, 4), w = 2 * pick(2, 4), oc = pick(1, 4);
      const int kernel = pick(0, 1) ? 3 : 1;
      const int stride = pick(0, 3) == 0 ? 2 : 1;
      std::vector<LayerSpec> layers{LayerSpec::conv2d(c, oc, kernel, stride), LayerSpec::relu()};
      int oh = (h + 2 * (kernel / 2) - kernel) / stride + 1, ow = (w + 2 * (kernel / 2) - kernel) / stride + 1;
      if (oh % 2 == 0 && ow % 2 == 0) {
        layers.push_back(LayerSpec::maxpool2());
        oh /= 2;
        ow /= 2;
      }
      layers.push_back(LayerSpec::flatten());
      layers.push_back(LayerSpec::dense(oc * oh * ow, pick(1, 3)));
      layers.push_back(LayerSpec::sigmoid());
      return {nn::Sequential<double>("conv" + std::to_string(k), layers),
              {static_cast<std::size_t>(c), static_cast<std::size_t>(h), static_cast<std::size_t>(w)},
              "conv c" + std::to_string(c) + " " + std::to_string(h) + "x" + std::to_string(w)};
    }
    case 1: {
      const int a = pick(1, 9), b = pick(1, 9), c = pick(1, 4);
      return {nn::Sequential<double>("mlp" + std::to_string(k),
                                     {LayerSpec::dense(a, b), LayerSpec::relu(), LayerSpec::dense(b, c),
                                      LayerSpec::sigmoid()}),
              {static_cast<std::size_t>(a)},
              "dense " + std::to_string(a) + "-" + std::to_string(b) + "-" + std::to_string(c)};
    }
    default: {
      const int in = pick(1, 4), hidden = pick(1, 6), depth = pick(1, 2), steps = pick(1, 6);
      return {nn::Sequential<double>("lstm" + std::to_string(k), {LayerSpec::lstm(in, hidden, depth)}),
              {static_cast<std::size_t>(steps), static_cast<std::size_t>(in)},
              "lstm " + std::to_string(in) + "->" + std::to_string(hidden) + " x" + std::to_string(depth) +
                  " T" + std::to_string(steps)};
    }
  }
}

/// Loss 0.5 * |y - target|^2 through `net`. `corrupt` flips the sign of the
/// gradient tensor holding the largest entry, emulating a broken backward pass.
inline nn::GradCheckResult check_stack(const StackCase& sc, std::uint64_t seed, bool corrupt = false) {
  Rng rng(seed);
  nn::ParameterStore<double> params;
  sc.net.init_parameters(params, rng);
  // Non-zero biases keep the check away from the all-zero special case.
  for (auto& e : params.entries())
    for (auto& v : e.value.data) v += 0.1 * rng.normal();
  nn::Tensor<double> x(sc.input_shape);
  for (auto& v : x.data) v = rng.normal();
  const auto out_shape = sc.net.output_shape(sc.input_shape);
  std::vector<double> target(nn::shape_size(out_shape));
  for (auto& v : target) v = rng.uniform();
  auto loss_fn = [&](const nn::ParameterStore<double>& p, nn::Gradients<double>* grads,
                     std::vector<std::uint32_t>* sig) {
    nn::Tape<double> tape;
    const auto y = sc.net.forward(p, x, &tape);
    double loss = 0;
    nn::Tensor<double> gy(y.shape);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = y.data[i] - target[i];
      loss += 0.5 * d * d;
      gy.data[i] = d;
    }
    if (grads) {
      sc.net.backward(p, tape, gy, *grads);
      if (corrupt) {
        std::size_t worst = 0;
        double peak = -1;
        for (std::size_t t = 0; t < grads->tensors.size(); ++t)
          for (const double g : grads->tensors[t])
            if (std::abs(g) > peak) {
              peak = std::abs(g);
              worst = t;
            }
        for (auto& g : grads->tensors[worst]) g = -g;
      }
    }
    if (sig) *sig = tape.kink_signature();
    return loss;
  };
  return nn::grad_check(params, loss_fn);
}

}  // namespace hism::testing
