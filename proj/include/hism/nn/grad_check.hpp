#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hism/nn/params.hpp"
#include "hism/random.hpp"

namespace hism::nn {

struct GradCheckOptions {
  double epsilon = 1e-3;
  double min_epsilon = 1e-7;
  std::size_t max_per_tensor = 0;  // 0 checks every coordinate
  std::uint64_t seed = 1;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

/// Compares analytic gradients against central differences (step epsilon,
/// Richardson-extrapolated with epsilon / 2).
/// `loss_fn(params, grads_or_null, signature_or_null) -> loss` evaluates the
/// loss, accumulating analytic gradients when asked and reporting the kink
/// signature of the forward pass. When a perturbation changes the signature
/// the step is shrunk so both probes stay on one linear piece.
/// Relative error is |a - n| / max(1, |a|, |n|).
template <class Fn>
GradCheckResult grad_check(ParameterStore<double>& params, Fn&& loss_fn,
                           const GradCheckOptions& opt = {}) {
  Gradients<double> analytic = params.zero_gradients();
  std::vector<std::uint32_t> sig0, sig;
  loss_fn(params, &analytic, &sig0);
  Rng rng(opt.seed);
  GradCheckResult res;
  for (std::size_t ti = 0; ti < params.tensor_count(); ++ti) {
    auto& values = params.value(ti).data;
    std::vector<std::size_t> idx(values.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    if (opt.max_per_tensor && idx.size() > opt.max_per_tensor) {
      rng.shuffle(idx);
      idx.resize(opt.max_per_tensor);
      std::sort(idx.begin(), idx.end());
    }
    for (const std::size_t k : idx) {
      const double orig = values[k];
      double eps = opt.epsilon;
      double numeric = 0;
      for (;;) {
        // Central differences at eps and eps / 2 combined by Richardson
        // extrapolation: O(eps^4) truncation instead of O(eps^2).
        bool same = true;
        auto central = [&](double h) {
          values[k] = orig + h;
          const double lp = loss_fn(params, nullptr, &sig);
          same = same && sig == sig0;
          values[k] = orig - h;
          const double lm = loss_fn(params, nullptr, &sig);
          same = same && sig == sig0;
          return (lp - lm) / (2 * h);
        };
        const double d1 = central(eps);
        const double d2 = central(eps / 2);
        values[k] = orig;
        numeric = (4 * d2 - d1) / 3;
        if (same || eps / 10 < opt.min_epsilon) break;
        eps /= 10;
      }
      const double a = analytic.tensors[ti][k];
      const double rel =
          std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      ++res.checked;
      if (res.checked == 1 || rel > res.max_rel_error) {
        res.max_rel_error = rel;
        res.worst_tensor = params.entries()[ti].name;
        res.worst_index = k;
        res.analytic = a;
        res.numeric = numeric;
      }
    }
  }
  return res;
}

}  // namespace hism::nn
