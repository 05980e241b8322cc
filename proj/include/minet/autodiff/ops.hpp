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

#include <vector>

#include "minet/autodiff/tape.hpp"
#include "minet/kernels.hpp"
#include "minet/rng.hpp"

/// Differentiable wrappers over the forward kernels. Every op evaluates the
/// forward kernel immediately and, on a recording tape, registers the
/// matching vector-Jacobian product.
namespace minet::ad {

template <typename T>
Var<T> add(Tape<T>& tape, const Var<T>& a, const Var<T>& b);

template <typename T>
Var<T> concat(Tape<T>& tape, const std::vector<Var<T>>& parts);

/// out channel i = x channel source[i].
template <typename T>
Var<T> gather_channels(Tape<T>& tape, const Var<T>& x, std::vector<int> source);

/// bias may be null. MACs are reported under the weight parameter's name
/// with its ".weight" suffix removed.
template <typename T>
Var<T> conv2d(Tape<T>& tape, const Var<T>& x, const Var<T>& weight, const Var<T>& bias,
              const ConvSpec& spec);

/// gamma/beta/running stats are (c,1,1,1) tensors. Train mode normalizes
/// with batch statistics and updates the running buffers in place; the
/// running update is not differentiated.
template <typename T>
Var<T> batchnorm(Tape<T>& tape, const Var<T>& x, const Var<T>& gamma, const Var<T>& beta,
                 Tensor4<T>& running_mean, Tensor4<T>& running_var, Mode mode,
                 double eps = 1e-5, double momentum = 0.1);

template <typename T>
Var<T> relu(Tape<T>& tape, const Var<T>& x);

template <typename T>
Var<T> sigmoid(Tape<T>& tape, const Var<T>& x);

template <typename T>
Var<T> resize_bilinear(Tape<T>& tape, const Var<T>& x, int out_h, int out_w);

/// Identity in infer mode; inverted dropout with a freshly drawn mask in
/// train mode.
template <typename T>
Var<T> dropout(Tape<T>& tape, const Var<T>& x, double rate, Rng& rng, Mode mode);

/// Elementwise product with a fixed (non-differentiated) tensor.
template <typename T>
Var<T> mul_constant(Tape<T>& tape, const Var<T>& x, Tensor4<T> factor);

template <typename T>
Var<T> scale(Tape<T>& tape, const Var<T>& x, T factor);

/// Scalar sum of all elements.
template <typename T>
Var<T> sum(Tape<T>& tape, const Var<T>& x);

/// Scalar sum(x * weights) with fixed weights.
template <typename T>
Var<T> dot(Tape<T>& tape, const Var<T>& x, const Tensor4<T>& weights);

}  // namespace minet::ad
