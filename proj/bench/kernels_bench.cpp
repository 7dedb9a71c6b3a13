#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hism/nn/kernels.hpp"

namespace k = hism::nn::kernels;

namespace {

std::vector<float> noise(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<float> d;
  std::vector<float> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

// Backbone layer shapes at the default 50x80 global input.
k::ConvGeom geom(int layer) {
  switch (layer) {
    case 0: return {4, 50, 80, 8, 3, 1, 1};
    case 1: return {8, 25, 40, 16, 3, 1, 1};
    default: return {16, 12, 20, 32, 3, 1, 1};
  }
}

struct ConvData {
  k::ConvGeom g;
  std::vector<float> in, w, b, out, gout, gin, gw, gb;
  explicit ConvData(int layer) : g(geom(layer)) {
    const std::size_t n_in = static_cast<std::size_t>(g.in_c) * g.in_h * g.in_w;
    const std::size_t n_out = static_cast<std::size_t>(g.out_c) * g.out_h() * g.out_w();
    in = noise(n_in, 1);
    w = noise(g.weight_size(), 2);
    b = noise(g.out_c, 3);
    gout = noise(n_out, 4);
    out.resize(n_out);
    gin.resize(n_in);
    gw.resize(g.weight_size());
    gb.resize(g.out_c);
  }
};

template <bool Parallel>
void conv_forward(benchmark::State& state) {
  ConvData d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel)
      k::parallel::conv2d_forward(d.g, d.in.data(), d.w.data(), d.b.data(), d.out.data());
    else
      k::reference::conv2d_forward(d.g, d.in.data(), d.w.data(), d.b.data(), d.out.data());
    benchmark::DoNotOptimize(d.out.data());
  }
}

template <bool Parallel>
void conv_backward(benchmark::State& state) {
  ConvData d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel)
      k::parallel::conv2d_backward(d.g, d.in.data(), d.w.data(), d.gout.data(), d.gin.data(), d.gw.data(),
                                   d.gb.data());
    else
      k::reference::conv2d_backward(d.g, d.in.data(), d.w.data(), d.gout.data(), d.gin.data(), d.gw.data(),
                                    d.gb.data());
    benchmark::DoNotOptimize(d.gw.data());
  }
}

template <bool Parallel>
void dense_pass(benchmark::State& state) {
  const int in_n = static_cast<int>(state.range(0)), out_n = static_cast<int>(state.range(1));
  const auto x = noise(in_n, 1), w = noise(static_cast<std::size_t>(in_n) * out_n, 2), b = noise(out_n, 3),
             gy = noise(out_n, 4);
  std::vector<float> y(out_n), gx(in_n), gw(w.size()), gb(out_n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::dense_forward(in_n, out_n, x.data(), w.data(), b.data(), y.data());
      k::parallel::dense_backward(in_n, out_n, x.data(), w.data(), gy.data(), gx.data(), gw.data(), gb.data());
    } else {
      k::reference::dense_forward(in_n, out_n, x.data(), w.data(), b.data(), y.data());
      k::reference::dense_backward(in_n, out_n, x.data(), w.data(), gy.data(), gx.data(), gw.data(), gb.data());
    }
    benchmark::DoNotOptimize(gw.data());
  }
}

}  // namespace

BENCHMARK(conv_forward<false>)->Name("conv_forward/reference")->DenseRange(0, 2);
BENCHMARK(conv_forward<true>)->Name("conv_forward/parallel")->DenseRange(0, 2);
BENCHMARK(conv_backward<false>)->Name("conv_backward/reference")->DenseRange(0, 2);
BENCHMARK(conv_backward<true>)->Name("conv_backward/parallel")->DenseRange(0, 2);
BENCHMARK(dense_pass<false>)->Name("dense/reference")->Args({1920, 64})->Args({96, 64});
BENCHMARK(dense_pass<true>)->Name("dense/parallel")->Args({1920, 64})->Args({96, 64});

BENCHMARK_MAIN();
