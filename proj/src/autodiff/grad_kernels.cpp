// Copyright (c) 2026 The MINet-cpp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "minet/autodiff/grad_kernels.hpp"

#include <algorithm>
#include <cmath>

#include "minet/parallel.hpp"

namespace minet::ad {

namespace {

inline void valid_range(int in, int out, int stride, int pad, int off, int& lo, int& hi) {
  const int shift = pad - off;
  lo = shift > 0 ? (shift + stride - 1) / stride : 0;
  const int last = in - 1 + shift;
  hi = last < 0 ? -1 : std::min(out - 1, last / stride);
}

}  // namespace

template <typename T>
Tensor4<T> conv2d_backward_input(const Tensor4<T>& grad_out, const ConvSpec& spec,
                                 std::span<const T> weight, const Shape4& input_shape) {
  Tensor4<T> gi(input_shape, T(0));
  const int k = spec.kernel, s = spec.stride, d = spec.dilation, p = spec.padding;
  const int cin_g = spec.c_in / spec.groups;
  const int cout_g = spec.c_out / spec.groups;
  const int H = input_shape.h, W = input_shape.w;
  const int oh = grad_out.h(), ow = grad_out.w();
  const int planes = input_shape.n * spec.c_in;
  parallel_for(planes, [&](int begin, int end) {
    for (int plane = begin; plane < end; ++plane) {
      const int b = plane / spec.c_in;
      const int ic = plane % spec.c_in;
      const int g = ic / cin_g;
      const int icl = ic % cin_g;
      T* dst = gi.plane(b, ic);
      for (int oc = g * cout_g; oc < (g + 1) * cout_g; ++oc) {
        const T* go = grad_out.plane(b, oc);
        const T* wk = weight.data() + (static_cast<std::size_t>(oc) * cin_g + icl) * k * k;
        for (int ky = 0; ky < k; ++ky) {
          int oy_lo, oy_hi;
          valid_range(H, oh, s, p, ky * d, oy_lo, oy_hi);
          for (int kx = 0; kx < k; ++kx) {
            const T wv = wk[ky * k + kx];
            int ox_lo, ox_hi;
            valid_range(W, ow, s, p, kx * d, ox_lo, ox_hi);
            const int base = kx * d - p;
            for (int oy = oy_lo; oy <= oy_hi; ++oy) {
              T* row = dst + static_cast<std::size_t>(oy * s - p + ky * d) * W;
              const T* grow = go + static_cast<std::size_t>(oy) * ow;
              for (int ox = ox_lo; ox <= ox_hi; ++ox) row[ox * s + base] += wv * grow[ox];
            }
          }
        }
      }
    }
  });
  return gi;
}

template <typename T>
Tensor4<T> conv2d_backward_weight(const Tensor4<T>& grad_out, const Tensor4<T>& input,
                                  const ConvSpec& spec) {
  Tensor4<T> gw(spec.weight_shape(), T(0));
  const int k = spec.kernel, s = spec.stride, d = spec.dilation, p = spec.padding;
  const int cin_g = spec.c_in / spec.groups;
  const int cout_g = spec.c_out / spec.groups;
  const int H = input.h(), W = input.w();
  const int oh = grad_out.h(), ow = grad_out.w();
  parallel_for(spec.c_out, [&](int begin, int end) {
    for (int oc = begin; oc < end; ++oc) {
      const int g = oc / cout_g;
      for (int icl = 0; icl < cin_g; ++icl) {
        T* wk = gw.data() + (static_cast<std::size_t>(oc) * cin_g + icl) * k * k;
        for (int ky = 0; ky < k; ++ky) {
          int oy_lo, oy_hi;
          valid_range(H, oh, s, p, ky * d, oy_lo, oy_hi);
          for (int kx = 0; kx < k; ++kx) {
            int ox_lo, ox_hi;
            valid_range(W, ow, s, p, kx * d, ox_lo, ox_hi);
            const int base = kx * d - p;
            T acc = 0;
            for (int b = 0; b < input.n(); ++b) {
              const T* go = grad_out.plane(b, oc);
              const T* src = input.plane(b, g * cin_g + icl);
              for (int oy = oy_lo; oy <= oy_hi; ++oy) {
                const T* row = src + static_cast<std::size_t>(oy * s - p + ky * d) * W;
                const T* grow = go + static_cast<std::size_t>(oy) * ow;
                for (int ox = ox_lo; ox <= ox_hi; ++ox) acc += grow[ox] * row[ox * s + base];
              }
            }
            wk[ky * k + kx] = acc;
          }
        }
      }
    }
  });
  return gw;
}

template <typename T>
std::vector<T> conv2d_backward_bias(const Tensor4<T>& grad_out) {
  std::vector<T> gb(grad_out.c(), T(0));
  const std::size_t plane = grad_out.shape().plane();
  for (int b = 0; b < grad_out.n(); ++b)
    for (int oc = 0; oc < grad_out.c(); ++oc) {
      const T* go = grad_out.plane(b, oc);
      for (std::size_t i = 0; i < plane; ++i) gb[oc] += go[i];
    }
  return gb;
}

template <typename T>
Tensor4<T> resize_bilinear_backward(const Tensor4<T>& grad_out, int in_h, int in_w) {
  const int out_h = grad_out.h(), out_w = grad_out.w();
  if (out_h == in_h && out_w == in_w) return grad_out;
  const auto ty = bilinear_taps(in_h, out_h);
  const auto tx = bilinear_taps(in_w, out_w);
  Tensor4<T> gi(Shape4{grad_out.n(), grad_out.c(), in_h, in_w}, T(0));
  const int planes = grad_out.n() * grad_out.c();
  parallel_for(planes, [&](int begin, int end) {
    for (int p = begin; p < end; ++p) {
      const T* go = grad_out.data() + static_cast<std::size_t>(p) * out_h * out_w;
      T* dst = gi.data() + static_cast<std::size_t>(p) * in_h * in_w;
      for (int oy = 0; oy < out_h; ++oy) {
        T* r0 = dst + static_cast<std::size_t>(ty[oy].i0) * in_w;
        T* r1 = dst + static_cast<std::size_t>(ty[oy].i1) * in_w;
        const T wy = static_cast<T>(ty[oy].w1);
        for (int ox = 0; ox < out_w; ++ox) {
          const T g = go[static_cast<std::size_t>(oy) * out_w + ox];
          const T wx = static_cast<T>(tx[ox].w1);
          const T gt = (T(1) - wy) * g;
          const T gb = wy * g;
          r0[tx[ox].i0] += (T(1) - wx) * gt;
          r0[tx[ox].i1] += wx * gt;
          r1[tx[ox].i0] += (T(1) - wx) * gb;
          r1[tx[ox].i1] += wx * gb;
        }
      }
    }
  });
  return gi;
}

template <typename T>
BatchNormGrads<T> batchnorm_backward_train(const Tensor4<T>& grad_out, const Tensor4<T>& input,
                                           std::span<const T> gamma, std::span<const T> mean,
                                           std::span<const T> var, double eps) {
  const int C = input.c();
  const std::size_t plane = input.shape().plane();
  const T m = static_cast<T>(static_cast<double>(input.n()) * plane);
  BatchNormGrads<T> g{Tensor4<T>(input.shape()), std::vector<T>(C, T(0)),
                      std::vector<T>(C, T(0))};
  for (int ch = 0; ch < C; ++ch) {
    const T inv = T(1) / std::sqrt(var[ch] + static_cast<T>(eps));
    T sum_g = 0, sum_gx = 0;
    for (int b = 0; b < input.n(); ++b) {
      const T* go = grad_out.plane(b, ch);
      const T* x = input.plane(b, ch);
      for (std::size_t i = 0; i < plane; ++i) {
        sum_g += go[i];
        sum_gx += go[i] * (x[i] - mean[ch]) * inv;
      }
    }
    g.beta[ch] = sum_g;
    g.gamma[ch] = sum_gx;
    const T scale = gamma[ch] * inv / m;
    for (int b = 0; b < input.n(); ++b) {
      const T* go = grad_out.plane(b, ch);
      const T* x = input.plane(b, ch);
      T* dst = g.input.plane(b, ch);
      for (std::size_t i = 0; i < plane; ++i) {
        const T xhat = (x[i] - mean[ch]) * inv;
        dst[i] = scale * (m * go[i] - sum_g - xhat * sum_gx);
      }
    }
  }
  return g;
}

template <typename T>
BatchNormGrads<T> batchnorm_backward_infer(const Tensor4<T>& grad_out, const Tensor4<T>& input,
                                           std::span<const T> gamma, std::span<const T> mean,
                                           std::span<const T> var, double eps) {
  const int C = input.c();
  const std::size_t plane = input.shape().plane();
  BatchNormGrads<T> g{Tensor4<T>(input.shape()), std::vector<T>(C, T(0)),
                      std::vector<T>(C, T(0))};
  for (int ch = 0; ch < C; ++ch) {
    const T inv = T(1) / std::sqrt(var[ch] + static_cast<T>(eps));
    for (int b = 0; b < input.n(); ++b) {
      const T* go = grad_out.plane(b, ch);
      const T* x = input.plane(b, ch);
      T* dst = g.input.plane(b, ch);
      for (std::size_t i = 0; i < plane; ++i) {
        g.beta[ch] += go[i];
        g.gamma[ch] += go[i] * (x[i] - mean[ch]) * inv;
        dst[i] = go[i] * gamma[ch] * inv;
      }
    }
  }
  return g;
}

#define MINET_INSTANTIATE(T)                                                                  \
  template Tensor4<T> conv2d_backward_input(const Tensor4<T>&, const ConvSpec&,               \
                                            std::span<const T>, const Shape4&);               \
  template Tensor4<T> conv2d_backward_weight(const Tensor4<T>&, const Tensor4<T>&,            \
                                             const ConvSpec&);                                \
  template std::vector<T> conv2d_backward_bias(const Tensor4<T>&);                            \
  template Tensor4<T> resize_bilinear_backward(const Tensor4<T>&, int, int);                  \
  template BatchNormGrads<T> batchnorm_backward_train(const Tensor4<T>&, const Tensor4<T>&,   \
                                                      std::span<const T>, std::span<const T>, \
                                                      std::span<const T>, double);            \
  template BatchNormGrads<T> batchnorm_backward_infer(const Tensor4<T>&, const Tensor4<T>&,   \
                                                      std::span<const T>, std::span<const T>, \
                                                      std::span<const T>, double);

MINET_INSTANTIATE(float)
MINET_INSTANTIATE(double)

}  // namespace minet::ad
