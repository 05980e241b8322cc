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

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "minet/autodiff/tape.hpp"
#include "minet/tensor.hpp"

namespace minet {

inline constexpr double kProbClamp = 1e-7;
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::array<double, kSsimWindow> ssim_gaussian();

struct LossReport {
  double total = 0;
  std::array<std::pair<double, double>, 5> per_head{};  // (bce, ssim)
};

/// Mean binary cross-entropy with predictions clamped to [1e-7, 1 - 1e-7].
template <typename T>
T bce_loss(const Tensor4<T>& s, const Tensor4<T>& g);

/// d bce / d s; zero where the clamp is active.
template <typename T>
Tensor4<T> bce_grad(const Tensor4<T>& s, const Tensor4<T>& g);

/// 1 - mean SSIM over every valid 11x11 window of every batch item.
/// Inputs must be single-channel and at least 11x11.
template <typename T>
T ssim_loss(const Tensor4<T>& s, const Tensor4<T>& g);

/// d ssim_loss / d s.
template <typename T>
Tensor4<T> ssim_grad(const Tensor4<T>& s, const Tensor4<T>& g);

template <typename T>
LossReport hybrid_loss(std::span<const Tensor4<T>> heads, const Tensor4<T>& g);

namespace ad {

template <typename T>
Var<T> bce_loss(Tape<T>& tape, const Var<T>& s, const Tensor4<T>& g);

template <typename T>
Var<T> ssim_loss(Tape<T>& tape, const Var<T>& s, const Tensor4<T>& g);

/// Sum over heads of bce + ssim. Fills report when non-null.
template <typename T>
Var<T> hybrid_loss(Tape<T>& tape, std::span<const Var<T>> heads, const Tensor4<T>& g,
                   LossReport* report = nullptr);

}  // namespace ad

}  // namespace minet
