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

#include "minet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "minet/parallel.hpp"

namespace minet {

void ConvSpec::validate() const {
  auto fail = [this](const std::string& what) {
    throw ShapeError("invalid ConvSpec (k=" + std::to_string(kernel) +
                     " s=" + std::to_string(stride) + " d=" + std::to_string(dilation) +
                     " p=" + std::to_string(padding) + " g=" + std::to_string(groups) +
                     " " + std::to_string(c_in) + "->" + std::to_string(c_out) +
                     "): " + what);
  };
  if (kernel < 1 || stride < 1 || dilation < 1) fail("kernel, stride, dilation must be >= 1");
  if (padding < 0) fail("negative padding");
  if (groups < 1 || c_in < 1 || c_out < 1) fail("channels and groups must be >= 1");
  if (c_in % groups != 0 || c_out % groups != 0) fail("channels not divisible by groups");
}

namespace {

// Range of output columns whose source column ox*stride - pad + off lies in
// [0, in).
inline void valid_range(int in, int out, int stride, int pad, int off, int& lo, int& hi) {
  const int shift = pad - off;  // ix = ox*stride - shift
  lo = shift > 0 ? (shift + stride - 1) / stride : 0;
  const int last = in - 1 + shift;
  hi = last < 0 ? -1 : std::min(out - 1, last / stride);
}

}  // namespace

template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& x, const ConvSpec& spec, std::span<const T> weight,
                  std::span<const T> bias, std::string_view tag) {
  spec.validate();
  if (x.c() != spec.c_in) {
    throw ShapeError("conv2d: input " + x.shape().str() + " has " + std::to_string(x.c()) +
                     " channels, spec expects " + std::to_string(spec.c_in));
  }
  if (weight.size() != spec.weight_count()) {
    throw ShapeError("conv2d: weight buffer has " + std::to_string(weight.size()) +
                     " values, expected " + spec.weight_shape().str());
  }
  if (!bias.empty() && bias.size() != static_cast<std::size_t>(spec.c_out)) {
    throw ShapeError("conv2d: bias length " + std::to_string(bias.size()) +
                     " != c_out " + std::to_string(spec.c_out));
  }
  const int oh = spec.out_size(x.h());
  const int ow = spec.out_size(x.w());
  if (oh < 1 || ow < 1) {
    throw ShapeError("conv2d: degenerate output " + std::to_string(oh) + "x" +
                     std::to_string(ow) + " for input " + std::to_string(x.h()) + "x" +
                     std::to_string(x.w()));
  }
  Tensor4<T> out(Shape4{x.n(), spec.c_out, oh, ow});
  const int k = spec.kernel, s = spec.stride, d = spec.dilation, p = spec.padding;
  const int cin_g = spec.c_in / spec.groups;
  const int cout_g = spec.c_out / spec.groups;
  const int H = x.h(), W = x.w();
  const int planes = x.n() * spec.c_out;

  std::vector<std::uint64_t> counted(planes, 0);
  parallel_for(planes, [&](int begin, int end) {
    for (int plane = begin; plane < end; ++plane) {
      const int b = plane / spec.c_out;
      const int oc = plane % spec.c_out;
      const int g = oc / cout_g;
      T* dst = out.plane(b, oc);
      std::fill(dst, dst + static_cast<std::size_t>(oh) * ow, bias.empty() ? T(0) : bias[oc]);
      std::uint64_t macs = 0;
      for (int icl = 0; icl < cin_g; ++icl) {
        const T* src = x.plane(b, g * cin_g + icl);
        const T* wk = weight.data() + (static_cast<std::size_t>(oc) * cin_g + icl) * k * k;
        for (int ky = 0; ky < k; ++ky) {
          int oy_lo, oy_hi;
          valid_range(H, oh, s, p, ky * d, oy_lo, oy_hi);
          for (int kx = 0; kx < k; ++kx) {
            const T wv = wk[ky * k + kx];
            macs += static_cast<std::uint64_t>(oh) * ow;
            int ox_lo, ox_hi;
            valid_range(W, ow, s, p, kx * d, ox_lo, ox_hi);
            if (ox_lo > ox_hi) continue;
            for (int oy = oy_lo; oy <= oy_hi; ++oy) {
              const int iy = oy * s - p + ky * d;
              const T* row = src + static_cast<std::size_t>(iy) * W;
              T* orow = dst + static_cast<std::size_t>(oy) * ow;
              const int base = kx * d - p;
              if (s == 1) {
                for (int ox = ox_lo; ox <= ox_hi; ++ox) orow[ox] += wv * row[ox + base];
              } else {
                for (int ox = ox_lo; ox <= ox_hi; ++ox) orow[ox] += wv * row[ox * s + base];
              }
            }
          }
        }
      }
      counted[plane] = macs;
    }
  });
  if (MacRecorder* rec = MacRecorder::active()) {
    rec->add(tag, std::accumulate(counted.begin(), counted.end(), std::uint64_t{0}));
  }
  return out;
}

template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& x, const ConvSpec& spec, const ConvWeights<T>& wts,
                  std::string_view tag) {
  if (wts.kernels.shape() != spec.weight_shape()) {
    throw ShapeError("conv2d: weight tensor " + wts.kernels.shape().str() +
                     " does not match spec " + spec.weight_shape().str());
  }
  if (spec.bias != !wts.bias.empty()) {
    throw ShapeError("conv2d: bias presence does not match spec");
  }
  return conv2d<T>(x, spec, wts.kernels.values(), std::span<const T>(wts.bias), tag);
}

template <typename T>
BatchStats<T> batch_statistics(const Tensor4<T>& x) {
  const int C = x.c();
  BatchStats<T> st{std::vector<T>(C, T(0)), std::vector<T>(C, T(0))};
  const std::size_t plane = x.shape().plane();
  const T m = static_cast<T>(static_cast<double>(x.n()) * plane);
  for (int ch = 0; ch < C; ++ch) {
    T sum = 0;
    for (int b = 0; b < x.n(); ++b) {
      const T* src = x.plane(b, ch);
      for (std::size_t i = 0; i < plane; ++i) sum += src[i];
    }
    const T mean = sum / m;
    T sq = 0;
    for (int b = 0; b < x.n(); ++b) {
      const T* src = x.plane(b, ch);
      for (std::size_t i = 0; i < plane; ++i) {
        const T dv = src[i] - mean;
        sq += dv * dv;
      }
    }
    st.mean[ch] = mean;
    st.var[ch] = sq / m;
  }
  return st;
}

template <typename T>
Tensor4<T> batchnorm_apply(const Tensor4<T>& x, std::span<const T> gamma,
                           std::span<const T> beta, std::span<const T> mean,
                           std::span<const T> var, double eps) {
  const std::size_t C = static_cast<std::size_t>(x.c());
  if (gamma.size() != C || beta.size() != C || mean.size() != C || var.size() != C) {
    throw ShapeError("batchnorm: parameter length " + std::to_string(gamma.size()) +
                     " does not match " + std::to_string(C) + " channels");
  }
  Tensor4<T> out(x.shape());
  const std::size_t plane = x.shape().plane();
  for (int b = 0; b < x.n(); ++b) {
    for (int ch = 0; ch < x.c(); ++ch) {
      const T inv = T(1) / std::sqrt(var[ch] + static_cast<T>(eps));
      const T scale = gamma[ch] * inv;
      const T* src = x.plane(b, ch);
      T* dst = out.plane(b, ch);
      for (std::size_t i = 0; i < plane; ++i) dst[i] = scale * (src[i] - mean[ch]) + beta[ch];
    }
  }
  return out;
}

template <typename T>
Tensor4<T> batchnorm(const Tensor4<T>& x, BNParams<T>& p, Mode mode) {
  if (x.c() != p.channels()) {
    throw ShapeError("batchnorm: input has " + std::to_string(x.c()) +
                     " channels, params have " + std::to_string(p.channels()));
  }
  if (mode == Mode::Infer) {
    return batchnorm_apply<T>(x, p.gamma, p.beta, p.running_mean, p.running_var, p.eps);
  }
  const BatchStats<T> st = batch_statistics(x);
  const double m = static_cast<double>(x.n()) * x.shape().plane();
  const T mom = static_cast<T>(p.momentum);
  for (int ch = 0; ch < x.c(); ++ch) {
    const T unbiased = m > 1 ? static_cast<T>(st.var[ch] * (m / (m - 1))) : st.var[ch];
    p.running_mean[ch] = (T(1) - mom) * p.running_mean[ch] + mom * st.mean[ch];
    p.running_var[ch] = (T(1) - mom) * p.running_var[ch] + mom * unbiased;
  }
  return batchnorm_apply<T>(x, p.gamma, p.beta, st.mean, st.var, p.eps);
}

template <typename T>
Tensor4<T> activate(const Tensor4<T>& x, Activation fn) {
  Tensor4<T> out(x.shape());
  const T* src = x.data();
  T* dst = out.data();
  if (fn == Activation::ReLU) {
    for (std::size_t i = 0; i < x.size(); ++i) dst[i] = src[i] < T(0) ? T(0) : src[i];  // NaN passes through
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) dst[i] = T(1) / (T(1) + std::exp(-src[i]));
  }
  return out;
}

template <typename T>
Tensor4<T> dropout_mask(const Shape4& shape, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  Tensor4<T> mask(shape, T(1));
  if (rate == 0.0) return mask;
  const T keep = static_cast<T>(1.0 / (1.0 - rate));
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.bernoulli(rate) ? T(0) : keep;
  return mask;
}

template <typename T>
Tensor4<T> dropout_train(const Tensor4<T>& x, double rate, Rng& rng) {
  const Tensor4<T> mask = dropout_mask<T>(x.shape(), rate, rng);
  if (rate == 0.0) return x;
  Tensor4<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * mask[i];
  return out;
}

template <typename T>
Tensor4<T> dropout(const Tensor4<T>& x, double rate, Rng& rng, Mode mode) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  return mode == Mode::Train ? dropout_train(x, rate, rng) : x;
}

namespace {
thread_local MacRecorder* g_recorder = nullptr;
}

MacRecorder::MacRecorder() : previous_(g_recorder) { g_recorder = this; }
MacRecorder::~MacRecorder() { g_recorder = previous_; }
MacRecorder* MacRecorder::active() { return g_recorder; }

void MacRecorder::add(std::string_view tag, std::uint64_t macs) {
  per_layer_[std::string(tag)] += macs;
}

std::uint64_t MacRecorder::total() const {
  std::uint64_t t = 0;
  for (const auto& [name, v] : per_layer_) t += v;
  return t;
}

#define MINET_INSTANTIATE(T)                                                              \
  template Tensor4<T> conv2d(const Tensor4<T>&, const ConvSpec&, std::span<const T>,      \
                             std::span<const T>, std::string_view);                       \
  template Tensor4<T> conv2d(const Tensor4<T>&, const ConvSpec&, const ConvWeights<T>&,   \
                             std::string_view);                                           \
  template BatchStats<T> batch_statistics(const Tensor4<T>&);                             \
  template Tensor4<T> batchnorm_apply(const Tensor4<T>&, std::span<const T>,              \
                                      std::span<const T>, std::span<const T>,             \
                                      std::span<const T>, double);                        \
  template Tensor4<T> batchnorm(const Tensor4<T>&, BNParams<T>&, Mode);                   \
  template Tensor4<T> activate(const Tensor4<T>&, Activation);                            \
  template Tensor4<T> dropout_mask(const Shape4&, double, Rng&);                          \
  template Tensor4<T> dropout_train(const Tensor4<T>&, double, Rng&);                     \
  template Tensor4<T> dropout(const Tensor4<T>&, double, Rng&, Mode);

MINET_INSTANTIATE(float)
MINET_INSTANTIATE(double)

}  // namespace minet
