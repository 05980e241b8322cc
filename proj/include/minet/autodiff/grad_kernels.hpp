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

#include <span>
#include <vector>

#include "minet/kernels.hpp"
#include "minet/tensor.hpp"

/// Vector-Jacobian products for the forward kernels.
namespace minet::ad {

template <typename T>
Tensor4<T> conv2d_backward_input(const Tensor4<T>& grad_out, const ConvSpec& spec,
                                 std::span<const T> weight, const Shape4& input_shape);

template <typename T>
Tensor4<T> conv2d_backward_weight(const Tensor4<T>& grad_out, const Tensor4<T>& input,
                                  const ConvSpec& spec);

template <typename T>
std::vector<T> conv2d_backward_bias(const Tensor4<T>& grad_out);

template <typename T>
Tensor4<T> resize_bilinear_backward(const Tensor4<T>& grad_out, int in_h, int in_w);

template <typename T>
struct BatchNormGrads {
  Tensor4<T> input;
  std::vector<T> gamma;
  std::vector<T> beta;
};

/// Gradient through batch-statistics normalization (train mode).
template <typename T>
BatchNormGrads<T> batchnorm_backward_train(const Tensor4<T>& grad_out, const Tensor4<T>& input,
                                           std::span<const T> gamma, std::span<const T> mean,
                                           std::span<const T> var, double eps);

/// Gradient through fixed-statistics normalization (infer mode).
template <typename T>
BatchNormGrads<T> batchnorm_backward_infer(const Tensor4<T>& grad_out, const Tensor4<T>& input,
                                           std::span<const T> gamma, std::span<const T> mean,
                                           std::span<const T> var, double eps);

}  // namespace minet::ad
