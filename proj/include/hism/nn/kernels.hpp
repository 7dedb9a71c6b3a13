#pragma once

// Compute kernels for single-example tensors. `reference` holds direct
// loop-nest versions used as test oracles and benchmark baselines; `parallel`
// holds the OpenMP versions used by the network. Parallel results do not
// depend on the thread count.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace hism::nn::kernels {

struct ConvGeom {
  int in_c = 0, in_h = 0, in_w = 0;
  int out_c = 0, kernel = 3, stride = 1, pad = 1;

  int out_h() const { return (in_h + 2 * pad - kernel) / stride + 1; }
  int out_w() const { return (in_w + 2 * pad - kernel) / stride + 1; }
  std::size_t weight_size() const {
    return static_cast<std::size_t>(out_c) * in_c * kernel * kernel;
  }
};

namespace reference {

template <class T>
void conv2d_forward(const ConvGeom& g, const T* in, const T* w, const T* b, T* out) {
  const int oh = g.out_h(), ow = g.out_w();
  for (int oc = 0; oc < g.out_c; ++oc)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        T acc = b[oc];
        for (int ic = 0; ic < g.in_c; ++ic)
          for (int ky = 0; ky < g.kernel; ++ky)
            for (int kx = 0; kx < g.kernel; ++kx) {
              const int iy = oy * g.stride + ky - g.pad;
              const int ix = ox * g.stride + kx - g.pad;
              if (iy < 0 || iy >= g.in_h || ix < 0 || ix >= g.in_w) continue;
              acc += w[((oc * g.in_c + ic) * g.kernel + ky) * g.kernel + kx] *
                     in[(ic * g.in_h + iy) * g.in_w + ix];
            }
        out[(oc * oh + oy) * ow + ox] = acc;
      }
}

// Accumulates into gin, gw, gb.
template <class T>
void conv2d_backward(const ConvGeom& g, const T* in, const T* w, const T* gout, T* gin, T* gw,
                     T* gb) {
  const int oh = g.out_h(), ow = g.out_w();
  for (int oc = 0; oc < g.out_c; ++oc)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        const T go = gout[(oc * oh + oy) * ow + ox];
        gb[oc] += go;
        for (int ic = 0; ic < g.in_c; ++ic)
          for (int ky = 0; ky < g.kernel; ++ky)
            for (int kx = 0; kx < g.kernel; ++kx) {
              const int iy = oy * g.stride + ky - g.pad;
              const int ix = ox * g.stride + kx - g.pad;
              if (iy < 0 || iy >= g.in_h || ix < 0 || ix >= g.in_w) continue;
              const std::size_t wi = ((oc * g.in_c + ic) * g.kernel + ky) * g.kernel + kx;
              const std::size_t ii = (ic * g.in_h + iy) * g.in_w + ix;
              gw[wi] += go * in[ii];
              gin[ii] += go * w[wi];
            }
      }
}

template <class T>
void dense_forward(int in_n, int out_n, const T* x, const T* w, const T* b, T* y) {
  for (int o = 0; o < out_n; ++o) {
    T acc = b[o];
    for (int i = 0; i < in_n; ++i) acc += w[o * in_n + i] * x[i];
    y[o] = acc;
  }
}

template <class T>
void dense_backward(int in_n, int out_n, const T* x, const T* w, const T* gy, T* gx, T* gw,
                    T* gb) {
  for (int o = 0; o < out_n; ++o) {
    gb[o] += gy[o];
    for (int i = 0; i < in_n; ++i) {
      gw[o * in_n + i] += gy[o] * x[i];
      gx[i] += gy[o] * w[o * in_n + i];
    }
  }
}

}  // namespace reference

namespace parallel {

namespace detail {
// Output columns [lo, hi) whose input column ox*stride + kx - pad is in range.
inline void col_range(int ow, int in_w, int kx, int stride, int pad, int& lo, int& hi) {
  const int a = pad - kx;
  lo = a > 0 ? (a + stride - 1) / stride : 0;
  const int b = in_w - 1 - kx + pad;
  hi = b < 0 ? 0 : std::min(ow, b / stride + 1);
  if (hi < lo) hi = lo;
}
}  // namespace detail

template <class T>
void conv2d_forward(const ConvGeom& g, const T* __restrict in, const T* __restrict w,
                    const T* __restrict b, T* __restrict out) {
  const int oh = g.out_h(), ow = g.out_w();
  const int s = g.stride;
#pragma omp parallel for schedule(static)
  for (int oc = 0; oc < g.out_c; ++oc) {
    T* o = out + static_cast<std::size_t>(oc) * oh * ow;
    std::fill(o, o + oh * ow, b[oc]);
    for (int ic = 0; ic < g.in_c; ++ic)
      for (int ky = 0; ky < g.kernel; ++ky)
        for (int kx = 0; kx < g.kernel; ++kx) {
          const T wv = w[((oc * g.in_c + ic) * g.kernel + ky) * g.kernel + kx];
          int lo, hi;
          detail::col_range(ow, g.in_w, kx, s, g.pad, lo, hi);
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * s + ky - g.pad;
            if (iy < 0 || iy >= g.in_h) continue;
            const T* irow = in + (static_cast<std::size_t>(ic) * g.in_h + iy) * g.in_w;
            T* orow = o + oy * ow;
            if (s == 1) {
              const T* src = irow + kx - g.pad;
              for (int ox = lo; ox < hi; ++ox) orow[ox] += wv * src[ox];
            } else {
              for (int ox = lo; ox < hi; ++ox) orow[ox] += wv * irow[ox * s + kx - g.pad];
            }
          }
        }
  }
}

template <class T>
void conv2d_backward(const ConvGeom& g, const T* __restrict in, const T* __restrict w,
                     const T* __restrict gout, T* __restrict gin, T* __restrict gw,
                     T* __restrict gb) {
  const int oh = g.out_h(), ow = g.out_w();
  const int s = g.stride;
#pragma omp parallel
  {
    std::vector<T> lane(static_cast<std::size_t>(ow));
#pragma omp for schedule(static)
    for (int oc = 0; oc < g.out_c; ++oc) {
      const T* go = gout + static_cast<std::size_t>(oc) * oh * ow;
      T bsum = 0;
      for (int k = 0; k < oh * ow; ++k) bsum += go[k];
      gb[oc] += bsum;
      for (int ic = 0; ic < g.in_c; ++ic)
        for (int ky = 0; ky < g.kernel; ++ky)
          for (int kx = 0; kx < g.kernel; ++kx) {
            int lo, hi;
            detail::col_range(ow, g.in_w, kx, s, g.pad, lo, hi);
            std::fill(lane.begin(), lane.end(), T{});
            for (int oy = 0; oy < oh; ++oy) {
              const int iy = oy * s + ky - g.pad;
              if (iy < 0 || iy >= g.in_h) continue;
              const T* irow = in + (static_cast<std::size_t>(ic) * g.in_h + iy) * g.in_w;
              const T* grow = go + oy * ow;
              if (s == 1) {
                const T* src = irow + kx - g.pad;
                for (int ox = lo; ox < hi; ++ox) lane[ox] += grow[ox] * src[ox];
              } else {
                for (int ox = lo; ox < hi; ++ox) lane[ox] += grow[ox] * irow[ox * s + kx - g.pad];
              }
            }
            T acc = 0;
            for (int ox = lo; ox < hi; ++ox) acc += lane[ox];
            gw[((oc * g.in_c + ic) * g.kernel + ky) * g.kernel + kx] += acc;
          }
    }
#pragma omp for schedule(static)
    for (int ic = 0; ic < g.in_c; ++ic) {
      T* gi = gin + static_cast<std::size_t>(ic) * g.in_h * g.in_w;
      for (int oc = 0; oc < g.out_c; ++oc) {
        const T* go = gout + static_cast<std::size_t>(oc) * oh * ow;
        for (int ky = 0; ky < g.kernel; ++ky)
          for (int kx = 0; kx < g.kernel; ++kx) {
            const T wv = w[((oc * g.in_c + ic) * g.kernel + ky) * g.kernel + kx];
            int lo, hi;
            detail::col_range(ow, g.in_w, kx, s, g.pad, lo, hi);
            for (int oy = 0; oy < oh; ++oy) {
              const int iy = oy * s + ky - g.pad;
              if (iy < 0 || iy >= g.in_h) continue;
              T* irow = gi + static_cast<std::size_t>(iy) * g.in_w;
              const T* grow = go + oy * ow;
              if (s == 1) {
                T* dst = irow + kx - g.pad;
                for (int ox = lo; ox < hi; ++ox) dst[ox] += wv * grow[ox];
              } else {
                for (int ox = lo; ox < hi; ++ox) irow[ox * s + kx - g.pad] += wv * grow[ox];
              }
            }
          }
      }
    }
  }
}

template <class T>
void dense_forward(int in_n, int out_n, const T* __restrict x, const T* __restrict w,
                   const T* __restrict b, T* __restrict y) {
#pragma omp parallel for schedule(static)
  for (int o = 0; o < out_n; ++o) {
    const T* row = w + static_cast<std::size_t>(o) * in_n;
    T acc = b[o];
    for (int i = 0; i < in_n; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

template <class T>
void dense_backward(int in_n, int out_n, const T* __restrict x, const T* __restrict w,
                    const T* __restrict gy, T* __restrict gx, T* __restrict gw,
                    T* __restrict gb) {
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int o = 0; o < out_n; ++o) {
      gb[o] += gy[o];
      T* row = gw + static_cast<std::size_t>(o) * in_n;
      const T go = gy[o];
      for (int i = 0; i < in_n; ++i) row[i] += go * x[i];
    }
    // gx columns are split across threads; each sums over o in order.
    const int chunk = 256;
#pragma omp for schedule(static)
    for (int c0 = 0; c0 < in_n; c0 += chunk) {
      const int c1 = std::min(in_n, c0 + chunk);
      for (int o = 0; o < out_n; ++o) {
        const T* row = w + static_cast<std::size_t>(o) * in_n;
        const T go = gy[o];
        for (int i = c0; i < c1; ++i) gx[i] += go * row[i];
      }
    }
  }
}

}  // namespace parallel

template <class T>
void maxpool2_forward(int c, int h, int w, const T* in, T* out, std::uint32_t* argmax) {
  const int oh = h / 2, ow = w / 2;
  for (int ch = 0; ch < c; ++ch)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        std::uint32_t best = static_cast<std::uint32_t>((ch * h + 2 * oy) * w + 2 * ox);
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const auto idx = static_cast<std::uint32_t>((ch * h + 2 * oy + dy) * w + 2 * ox + dx);
            if (in[idx] > in[best]) best = idx;
          }
        const std::size_t o = (static_cast<std::size_t>(ch) * oh + oy) * ow + ox;
        out[o] = in[best];
        argmax[o] = best;
      }
}

}  // namespace hism::nn::kernels
