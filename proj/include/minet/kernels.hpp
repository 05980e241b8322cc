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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minet/rng.hpp"
#include "minet/tensor.hpp"

namespace minet {

enum class Mode { Train, Infer };
enum class Activation { ReLU, Sigmoid };

/// Geometry of one 2-D convolution (square kernel). Covers dense,
/// depthwise (groups == c_in == c_out), pointwise (kernel 1) and grouped
/// layouts; groups partition input and output channels contiguously.
struct ConvSpec {
  int kernel = 3;
  int stride = 1;
  int dilation = 1;
  int padding = 0;
  int groups = 1;
  int c_in = 1;
  int c_out = 1;
  bool bias = false;

  void validate() const;
  int out_size(int in) const {
    return (in + 2 * padding - dilation * (kernel - 1) - 1) / stride + 1;
  }
  Shape4 weight_shape() const { return {c_out, c_in / groups, kernel, kernel}; }
  std::size_t weight_count() const { return weight_shape().count(); }
  std::size_t param_count() const { return weight_count() + (bias ? c_out : 0); }
  /// Multiply-accumulates for an output of out_h x out_w.
  std::uint64_t macs(int out_h, int out_w) const {
    return static_cast<std::uint64_t>(c_out) * (c_in / groups) * kernel * kernel *
           out_h * out_w;
  }
  bool is_depthwise() const { return groups == c_in && c_in == c_out; }
  bool is_pointwise() const { return kernel == 1 && stride == 1 && dilation == 1; }

  static ConvSpec depthwise(int c, int k, int stride, int dilation, int padding) {
    return {k, stride, dilation, padding, c, c, c, false};
  }
  static ConvSpec pointwise(int c_in, int c_out, int groups = 1, bool bias = false) {
    return {1, 1, 1, 0, groups, c_in, c_out, bias};
  }
  static ConvSpec dense(int c_in, int c_out, int k, int stride, int padding) {
    return {k, stride, 1, padding, 1, c_in, c_out, false};
  }
};

template <typename T>
struct ConvWeights {
  Tensor4<T> kernels;  // (c_out, c_in / groups, k, k)
  std::vector<T> bias;  // empty or c_out
};

template <typename T>
struct BNParams {
  std::vector<T> gamma;
  std::vector<T> beta;
  std::vector<T> running_mean;
  std::vector<T> running_var;
  double eps = 1e-5;
  double momentum = 0.1;

  explicit BNParams(int c = 0)
      : gamma(c, T(1)), beta(c, T(0)), running_mean(c, T(0)), running_var(c, T(1)) {}
  int channels() const { return static_cast<int>(gamma.size()); }
};

/// Per-channel mean and biased variance over (n, h, w).
template <typename T>
struct BatchStats {
  std::vector<T> mean;
  std::vector<T> var;
};

// --- convolution --------------------------------------------------------

template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& x, const ConvSpec& spec, std::span<const T> weight,
                  std::span<const T> bias = {}, std::string_view tag = {});

template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& x, const ConvSpec& spec, const ConvWeights<T>& wts,
                  std::string_view tag = {});

// --- normalization -------------------------------------------------------

template <typename T>
BatchStats<T> batch_statistics(const Tensor4<T>& x);

/// y = gamma * (x - mean) / sqrt(var + eps) + beta, per channel.
template <typename T>
Tensor4<T> batchnorm_apply(const Tensor4<T>& x, std::span<const T> gamma,
                           std::span<const T> beta, std::span<const T> mean,
                           std::span<const T> var, double eps);

/// Infer mode normalizes with the running statistics. Train mode uses the
/// batch statistics and updates the running ones with momentum (unbiased
/// variance for the running estimate).
template <typename T>
Tensor4<T> batchnorm(const Tensor4<T>& x, BNParams<T>& p, Mode mode);

// --- pointwise ------------------------------------------------------------

template <typename T>
Tensor4<T> activate(const Tensor4<T>& x, Activation fn);

/// Inverted-dropout scale mask: 0 with probability rate, else 1/(1-rate).
template <typename T>
Tensor4<T> dropout_mask(const Shape4& shape, double rate, Rng& rng);

template <typename T>
Tensor4<T> dropout_train(const Tensor4<T>& x, double rate, Rng& rng);

template <typename T>
Tensor4<T> dropout(const Tensor4<T>& x, double rate, Rng& rng, Mode mode);

// --- instrumentation -----------------------------------------------------

/// Collects multiply-accumulates counted inside the convolution loops,
/// keyed by the tag passed to conv2d. Installed per thread; nested
/// recorders shadow outer ones.
class MacRecorder {
 public:
  MacRecorder();
  ~MacRecorder();
  MacRecorder(const MacRecorder&) = delete;
  MacRecorder& operator=(const MacRecorder&) = delete;

  static MacRecorder* active();
  void add(std::string_view tag, std::uint64_t macs);

  const std::map<std::string, std::uint64_t>& per_layer() const { return per_layer_; }
  std::uint64_t total() const;

 private:
  std::map<std::string, std::uint64_t> per_layer_;
  MacRecorder* previous_;
};

}  // namespace minet
