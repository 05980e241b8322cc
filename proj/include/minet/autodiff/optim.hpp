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
#include <vector>

#include "minet/autodiff/param_store.hpp"
#include "minet/kernels.hpp"
#include "minet/rng.hpp"

namespace minet::ad {

template <typename T>
struct AdamState {
  double lr = 4e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<Tensor4<T>> m;  // aligned with ParamStore order
  std::vector<Tensor4<T>> v;
};

/// One bias-corrected Adam update over every parameter in the store.
/// Gradients are left untouched; moments are created on the first call.
template <typename T>
void adam_step(ParamStore<T>& store, AdamState<T>& state);

/// Uniform Xavier/Glorot draw in [-a, a] with
/// a = sqrt(6 / (fan_in + fan_out)), fan = (channels / groups) * k^2.
template <typename T>
ConvWeights<T> xavier_init(const ConvSpec& spec, Rng& rng);

double xavier_bound(const ConvSpec& spec);

}  // namespace minet::ad
