#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hism/error.hpp"
#include "hism/nn/kernels.hpp"
#include "hism/nn/params.hpp"
#include "hism/nn/tensor.hpp"
#include "hism/random.hpp"

namespace hism::nn {

enum class LayerKind { conv2d, maxpool2, relu, dense, sigmoid, flatten, lstm };

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& s);

struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  int in = 0;        // conv in-channels, dense in-features, lstm input size
  int out = 0;       // conv out-channels, dense out-features, lstm hidden size
  int kernel = 3;
  int stride = 1;
  int padding = -1;  // -1: kernel / 2
  int layers = 1;    // lstm depth

  int effective_padding() const { return padding < 0 ? kernel / 2 : padding; }

  static LayerSpec conv2d(int in, int out, int kernel = 3, int stride = 1, int padding = -1) {
    return {LayerKind::conv2d, in, out, kernel, stride, padding < 0 ? kernel / 2 : padding, 1};
  }
  static LayerSpec dense(int in, int out) { return {LayerKind::dense, in, out, 0, 1, 0, 1}; }
  static LayerSpec lstm(int input, int hidden, int layers) {
    return {LayerKind::lstm, input, hidden, 0, 1, 0, layers};
  }
  static LayerSpec maxpool2() { return {LayerKind::maxpool2}; }
  static LayerSpec relu() { return {LayerKind::relu}; }
  static LayerSpec sigmoid() { return {LayerKind::sigmoid}; }
  static LayerSpec flatten() { return {LayerKind::flatten}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

void to_json(nlohmann::json& j, const LayerSpec& s);
void from_json(const nlohmann::json& j, LayerSpec& s);

/// Forward state recorded for one layer.
template <class T>
struct LayerTape {
  Tensor<T> input;
  Tensor<T> output;
  std::vector<std::uint32_t> argmax;
  std::vector<T> cache;
  bool relu = false;
};

template <class T>
struct Tape {
  std::vector<LayerTape<T>> layers;

  /// ReLU sign pattern and max-pool winners; a change means a finite
  /// difference straddled a kink.
  std::vector<std::uint32_t> kink_signature() const {
    std::vector<std::uint32_t> sig;
    for (const auto& l : layers) {
      sig.insert(sig.end(), l.argmax.begin(), l.argmax.end());
      if (l.relu)
        for (std::size_t i = 0; i < l.input.size(); ++i)
          sig.push_back(l.input.data[i] > T{0} ? 1u : 0u);
    }
    return sig;
  }
};

namespace detail {

template <class T>
T sigmoid(T x) {
  return T{1} / (T{1} + std::exp(-x));
}

template <class T>
void check_finite(const Tensor<T>& t, const std::string& layer) {
  for (const T v : t.data)
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite_activation, "layer " + layer);
}

inline std::string lstm_param(const std::string& prefix, int layer, const char* what) {
  return prefix + ".l" + std::to_string(layer) + "." + what;
}

}  // namespace detail

/// Stacked LSTM over a [steps, input] sequence; returns the top layer's
/// final hidden state. Gate order i, f, g, o.
template <class T>
Tensor<T> lstm_forward(const LayerSpec& spec, const ParameterStore<T>& params,
                       const std::string& prefix, const Tensor<T>& seq,
                       LayerTape<T>* tape = nullptr) {
  if (seq.shape.size() != 2 || static_cast<int>(seq.shape[1]) != spec.in)
    throw Error(ErrorCode::shape_mismatch,
                prefix + ": lstm expects [steps," + std::to_string(spec.in) + "], got " +
                    shape_string(seq.shape));
  const int steps = static_cast<int>(seq.shape[0]);
  if (steps == 0) throw Error(ErrorCode::empty_sequence, prefix + ": empty sequence");
  const int H = spec.out;
  const int L = spec.layers;
  const std::size_t stride = 6 * static_cast<std::size_t>(H);
  std::vector<T> cache(static_cast<std::size_t>(L) * steps * stride);
  std::vector<T> z(4 * H);
  for (int l = 0; l < L; ++l) {
    const int in_dim = l == 0 ? spec.in : H;
    const auto& wx = params.value(detail::lstm_param(prefix, l, "wx")).data;
    const auto& wh = params.value(detail::lstm_param(prefix, l, "wh")).data;
    const auto& b = params.value(detail::lstm_param(prefix, l, "b")).data;
    for (int t = 0; t < steps; ++t) {
      const T* x = l == 0 ? seq.data.data() + static_cast<std::size_t>(t) * in_dim
                          : cache.data() + ((l - 1) * steps + t) * stride + 5 * H;
      const T* hp = t > 0 ? cache.data() + (l * steps + t - 1) * stride + 5 * H : nullptr;
      const T* cp = t > 0 ? cache.data() + (l * steps + t - 1) * stride + 4 * H : nullptr;
      kernels::parallel::dense_forward(in_dim, 4 * H, x, wx.data(), b.data(), z.data());
      if (hp)
        for (int r = 0; r < 4 * H; ++r) {
          T acc = 0;
          for (int k = 0; k < H; ++k) acc += wh[r * H + k] * hp[k];
          z[r] += acc;
        }
      T* cur = cache.data() + (l * steps + t) * stride;
      for (int k = 0; k < H; ++k) {
        const T i = detail::sigmoid(z[k]);
        const T f = detail::sigmoid(z[H + k]);
        const T g = std::tanh(z[2 * H + k]);
        const T o = detail::sigmoid(z[3 * H + k]);
        const T c = f * (cp ? cp[k] : T{0}) + i * g;
        cur[k] = i;
        cur[H + k] = f;
        cur[2 * H + k] = g;
        cur[3 * H + k] = o;
        cur[4 * H + k] = c;
        cur[5 * H + k] = o * std::tanh(c);
      }
    }
  }
  const T* last = cache.data() + ((L - 1) * steps + steps - 1) * stride + 5 * H;
  Tensor<T> out(Shape{static_cast<std::size_t>(H)}, std::vector<T>(last, last + H));
  if (tape) tape->cache = std::move(cache);
  return out;
}

/// Backward through lstm_forward; returns d(loss)/d(sequence).
template <class T>
Tensor<T> lstm_backward(const LayerSpec& spec, const ParameterStore<T>& params,
                        const std::string& prefix, const Tensor<T>& seq, const LayerTape<T>& tape,
                        const Tensor<T>& grad_out, Gradients<T>& grads) {
  const int steps = static_cast<int>(seq.shape[0]);
  const int H = spec.out;
  const int L = spec.layers;
  const std::size_t stride = 6 * static_cast<std::size_t>(H);
  const auto& cache = tape.cache;
  std::vector<T> dh_ext(static_cast<std::size_t>(steps) * H, T{0});
  std::copy(grad_out.data.begin(), grad_out.data.end(),
            dh_ext.begin() + static_cast<std::ptrdiff_t>(steps - 1) * H);
  std::vector<T> dx_ext;
  std::vector<T> dz(4 * H), dh_next(H), dc_next(H);
  for (int l = L - 1; l >= 0; --l) {
    const int in_dim = l == 0 ? spec.in : H;
    const std::size_t iwx = params.index(detail::lstm_param(prefix, l, "wx"));
    const std::size_t iwh = params.index(detail::lstm_param(prefix, l, "wh"));
    const std::size_t ib = params.index(detail::lstm_param(prefix, l, "b"));
    const auto& wx = params.value(iwx).data;
    const auto& wh = params.value(iwh).data;
    auto& gwx = grads.tensors[iwx];
    auto& gwh = grads.tensors[iwh];
    auto& gb = grads.tensors[ib];
    dx_ext.assign(static_cast<std::size_t>(steps) * in_dim, T{0});
    std::fill(dh_next.begin(), dh_next.end(), T{0});
    std::fill(dc_next.begin(), dc_next.end(), T{0});
    for (int t = steps - 1; t >= 0; --t) {
      const T* cur = cache.data() + (l * steps + t) * stride;
      const T* prev = t > 0 ? cache.data() + (l * steps + t - 1) * stride : nullptr;
      const T* x = l == 0 ? seq.data.data() + static_cast<std::size_t>(t) * in_dim
                          : cache.data() + ((l - 1) * steps + t) * stride + 5 * H;
      for (int k = 0; k < H; ++k) {
        const T i = cur[k], f = cur[H + k], g = cur[2 * H + k], o = cur[3 * H + k];
        const T c = cur[4 * H + k];
        const T c_prev = prev ? prev[4 * H + k] : T{0};
        const T dh = dh_ext[static_cast<std::size_t>(t) * H + k] + dh_next[k];
        const T tc = std::tanh(c);
        const T dc = dh * o * (T{1} - tc * tc) + dc_next[k];
        dz[k] = dc * g * i * (T{1} - i);
        dz[H + k] = dc * c_prev * f * (T{1} - f);
        dz[2 * H + k] = dc * i * (T{1} - g * g);
        dz[3 * H + k] = dh * tc * o * (T{1} - o);
        dc_next[k] = dc * f;
      }
      kernels::parallel::dense_backward(in_dim, 4 * H, x, wx.data(), dz.data(),
                                        dx_ext.data() + static_cast<std::size_t>(t) * in_dim,
                                        gwx.data(), gb.data());
      std::fill(dh_next.begin(), dh_next.end(), T{0});
      if (prev) {
        const T* hp = prev + 5 * H;
        for (int r = 0; r < 4 * H; ++r) {
          const T d = dz[r];
          for (int k = 0; k < H; ++k) {
            gwh[r * H + k] += d * hp[k];
            dh_next[k] += d * wh[r * H + k];
          }
        }
      }
    }
    dh_ext = dx_ext;
  }
  return Tensor<T>(seq.shape, std::move(dx_ext));
}

/// A chain of layers whose parameters live in a ParameterStore under
/// "<prefix>.<index>.<name>".
template <class T>
class Sequential {
 public:
  Sequential() = default;
  Sequential(std::string prefix, std::vector<LayerSpec> layers)
      : prefix_(std::move(prefix)), layers_(std::move(layers)) {}

  const std::string& prefix() const { return prefix_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }

  std::string layer_name(std::size_t i) const {
    return prefix_ + "." + std::to_string(i) + ":" + to_string(layers_[i].kind);
  }
  std::string param_name(std::size_t i, const char* what) const {
    return prefix_ + "." + std::to_string(i) + "." + what;
  }

  /// Adds this chain's parameters to the store with fresh initial values.
  void init_parameters(ParameterStore<T>& store, Rng& rng) const {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const LayerSpec& s = layers_[i];
      if (s.kind == LayerKind::conv2d || s.kind == LayerKind::dense) {
        const int k2 = s.kind == LayerKind::conv2d ? s.kernel * s.kernel : 1;
        Shape wshape = s.kind == LayerKind::conv2d
                           ? Shape{std::size_t(s.out), std::size_t(s.in), std::size_t(s.kernel),
                                   std::size_t(s.kernel)}
                           : Shape{std::size_t(s.out), std::size_t(s.in)};
        const std::size_t wi = store.add(param_name(i, "w"), wshape);
        const std::size_t bi = store.add(param_name(i, "b"), Shape{std::size_t(s.out)});
        const double bound = std::sqrt(6.0 / (s.in * k2));
        for (auto& v : store.value(wi).data) v = static_cast<T>(rng.uniform(-bound, bound));
        (void)bi;
      } else if (s.kind == LayerKind::lstm) {
        const std::string p = prefix_ + "." + std::to_string(i);
        const double bound = 1.0 / std::sqrt(static_cast<double>(s.out));
        const std::size_t H = s.out;
        for (int l = 0; l < s.layers; ++l) {
          const std::size_t in_dim = l == 0 ? s.in : s.out;
          const std::size_t a = store.add(detail::lstm_param(p, l, "wx"), Shape{4 * H, in_dim});
          const std::size_t b = store.add(detail::lstm_param(p, l, "wh"), Shape{4 * H, H});
          const std::size_t c = store.add(detail::lstm_param(p, l, "b"), Shape{4 * H});
          for (auto& v : store.value(a).data) v = static_cast<T>(rng.uniform(-bound, bound));
          for (auto& v : store.value(b).data) v = static_cast<T>(rng.uniform(-bound, bound));
          auto& bias = store.value(c).data;
          for (auto& v : bias) v = static_cast<T>(rng.uniform(-bound, bound));
          for (std::size_t k = H; k < 2 * H; ++k) bias[k] += T{1};
        }
      }
    }
  }

  /// Output shape for an input shape; throws ShapeMismatch naming the layer.
  Shape output_shape(Shape shape) const {
    for (std::size_t i = 0; i < layers_.size(); ++i) shape = layer_output_shape(i, shape);
    return shape;
  }

  Tensor<T> forward(const ParameterStore<T>& params, const Tensor<T>& input,
                    Tape<T>* tape = nullptr) const {
    if (tape) tape->layers.assign(layers_.size(), {});
    Tensor<T> x = input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const Shape out_shape = layer_output_shape(i, x.shape);
      LayerTape<T>* lt = tape ? &tape->layers[i] : nullptr;
      Tensor<T> y = forward_layer(i, params, x, out_shape, lt);
      detail::check_finite(y, layer_name(i));
      if (lt) {
        lt->relu = layers_[i].kind == LayerKind::relu;
        lt->input = std::move(x);
        lt->output = y;
      }
      x = std::move(y);
    }
    return x;
  }

  /// Accumulates parameter gradients; returns d(loss)/d(input).
  Tensor<T> backward(const ParameterStore<T>& params, const Tape<T>& tape,
                     const Tensor<T>& grad_output, Gradients<T>& grads) const {
    Tensor<T> g = grad_output;
    for (std::size_t n = layers_.size(); n-- > 0;) g = backward_layer(n, params, tape.layers[n], g, grads);
    return g;
  }

 private:
  Shape layer_output_shape(std::size_t i, const Shape& in) const {
    const LayerSpec& s = layers_[i];
    auto fail = [&](const std::string& want) -> Shape {
      throw Error(ErrorCode::shape_mismatch,
                  layer_name(i) + " expects " + want + ", got " + shape_string(in));
    };
    switch (s.kind) {
      case LayerKind::conv2d: {
        if (in.size() != 3 || static_cast<int>(in[0]) != s.in)
          return fail("[" + std::to_string(s.in) + ",H,W]");
        const kernels::ConvGeom g = geom(s, in);
        if (g.out_h() <= 0 || g.out_w() <= 0) return fail("spatial size >= kernel");
        return {std::size_t(s.out), std::size_t(g.out_h()), std::size_t(g.out_w())};
      }
      case LayerKind::maxpool2:
        if (in.size() != 3 || in[1] < 2 || in[2] < 2) return fail("[C,H>=2,W>=2]");
        return {in[0], in[1] / 2, in[2] / 2};
      case LayerKind::relu:
      case LayerKind::sigmoid:
        return in;
      case LayerKind::flatten:
        return {shape_size(in)};
      case LayerKind::dense:
        if (in.size() != 1 || static_cast<int>(in[0]) != s.in)
          return fail("[" + std::to_string(s.in) + "]");
        return {std::size_t(s.out)};
      case LayerKind::lstm:
        if (in.size() != 2 || static_cast<int>(in[1]) != s.in || in[0] == 0)
          return fail("[steps>=1," + std::to_string(s.in) + "]");
        return {std::size_t(s.out)};
    }
    return in;
  }

  static kernels::ConvGeom geom(const LayerSpec& s, const Shape& in) {
    kernels::ConvGeom g;
    g.in_c = static_cast<int>(in[0]);
    g.in_h = static_cast<int>(in[1]);
    g.in_w = static_cast<int>(in[2]);
    g.out_c = s.out;
    g.kernel = s.kernel;
    g.stride = s.stride;
    g.pad = s.effective_padding();
    return g;
  }

  Tensor<T> forward_layer(std::size_t i, const ParameterStore<T>& params, const Tensor<T>& x,
                          const Shape& out_shape, LayerTape<T>* lt) const {
    const LayerSpec& s = layers_[i];
    Tensor<T> y(out_shape);
    switch (s.kind) {
      case LayerKind::conv2d: {
        const auto& w = params.value(param_name(i, "w")).data;
        const auto& b = params.value(param_name(i, "b")).data;
        kernels::parallel::conv2d_forward(geom(s, x.shape), x.data.data(), w.data(), b.data(),
                                          y.data.data());
        break;
      }
      case LayerKind::maxpool2: {
        std::vector<std::uint32_t> argmax(y.size());
        kernels::maxpool2_forward(int(x.shape[0]), int(x.shape[1]), int(x.shape[2]),
                                  x.data.data(), y.data.data(), argmax.data());
        if (lt) lt->argmax = std::move(argmax);
        break;
      }
      case LayerKind::relu:
        for (std::size_t k = 0; k < x.size(); ++k) y.data[k] = x.data[k] > T{0} ? x.data[k] : T{0};
        break;
      case LayerKind::sigmoid:
        for (std::size_t k = 0; k < x.size(); ++k) y.data[k] = detail::sigmoid(x.data[k]);
        break;
      case LayerKind::flatten:
        y.data = x.data;
        break;
      case LayerKind::dense: {
        const auto& w = params.value(param_name(i, "w")).data;
        const auto& b = params.value(param_name(i, "b")).data;
        kernels::parallel::dense_forward(s.in, s.out, x.data.data(), w.data(), b.data(),
                                         y.data.data());
        break;
      }
      case LayerKind::lstm:
        y = lstm_forward(s, params, prefix_ + "." + std::to_string(i), x, lt);
        break;
    }
    return y;
  }

  Tensor<T> backward_layer(std::size_t i, const ParameterStore<T>& params, const LayerTape<T>& lt,
                           const Tensor<T>& g, Gradients<T>& grads) const {
    const LayerSpec& s = layers_[i];
    const Tensor<T>& x = lt.input;
    Tensor<T> gx(x.shape);
    switch (s.kind) {
      case LayerKind::conv2d: {
        const std::size_t wi = params.index(param_name(i, "w"));
        const std::size_t bi = params.index(param_name(i, "b"));
        kernels::parallel::conv2d_backward(geom(s, x.shape), x.data.data(),
                                           params.value(wi).data.data(), g.data.data(),
                                           gx.data.data(), grads.tensors[wi].data(),
                                           grads.tensors[bi].data());
        break;
      }
      case LayerKind::maxpool2:
        for (std::size_t k = 0; k < g.size(); ++k) gx.data[lt.argmax[k]] += g.data[k];
        break;
      case LayerKind::relu:
        for (std::size_t k = 0; k < x.size(); ++k) gx.data[k] = x.data[k] > T{0} ? g.data[k] : T{0};
        break;
      case LayerKind::sigmoid:
        for (std::size_t k = 0; k < x.size(); ++k) {
          const T y = lt.output.data[k];
          gx.data[k] = g.data[k] * y * (T{1} - y);
        }
        break;
      case LayerKind::flatten:
        gx.data = g.data;
        break;
      case LayerKind::dense: {
        const std::size_t wi = params.index(param_name(i, "w"));
        const std::size_t bi = params.index(param_name(i, "b"));
        kernels::parallel::dense_backward(s.in, s.out, x.data.data(), params.value(wi).data.data(),
                                          g.data.data(), gx.data.data(), grads.tensors[wi].data(),
                                          grads.tensors[bi].data());
        break;
      }
      case LayerKind::lstm:
        gx = lstm_backward(s, params, prefix_ + "." + std::to_string(i), x, lt, g, grads);
        break;
    }
    return gx;
  }

  std::string prefix_;
  std::vector<LayerSpec> layers_;
};

}  // namespace hism::nn
