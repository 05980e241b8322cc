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

#include "minet/autodiff/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace minet::ad {

template <typename T>
void adam_step(ParamStore<T>& store, AdamState<T>& state) {
  if (state.m.empty() && state.step == 0) {
    for (std::size_t i = 0; i < store.size(); ++i) {
      state.m.emplace_back(store.at(i).value.shape(), T(0));
      state.v.emplace_back(store.at(i).value.shape(), T(0));
    }
  }
  if (state.m.size() != store.size() || state.v.size() != store.size()) {
    throw std::logic_error("adam_step: moment count does not match parameter count");
  }
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (state.m[i].shape() != store.at(i).value.shape() ||
        state.v[i].shape() != store.at(i).value.shape()) {
      throw std::logic_error("adam_step: moment shape drift for " + store.at(i).name);
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const T b1 = static_cast<T>(state.beta1), b2 = static_cast<T>(state.beta2);
  const T step_size = static_cast<T>(state.lr / bc1);
  const T inv_sqrt_bc2 = static_cast<T>(1.0 / std::sqrt(bc2));
  const T eps = static_cast<T>(state.eps);
  for (std::size_t i = 0; i < store.size(); ++i) {
    Parameter<T>& p = store.at(i);
    T* m = state.m[i].data();
    T* v = state.v[i].data();
    T* w = p.value.data();
    const T* g = p.grad.data();
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      m[j] = b1 * m[j] + (T(1) - b1) * g[j];
      v[j] = b2 * v[j] + (T(1) - b2) * g[j] * g[j];
      w[j] -= step_size * m[j] / (std::sqrt(v[j]) * inv_sqrt_bc2 + eps);
    }
  }
}

double xavier_bound(const ConvSpec& spec) {
  const double k2 = static_cast<double>(spec.kernel) * spec.kernel;
  const double fan_in = static_cast<double>(spec.c_in / spec.groups) * k2;
  const double fan_out = static_cast<double>(spec.c_out / spec.groups) * k2;
  return std::sqrt(6.0 / (fan_in + fan_out));
}

template <typename T>
ConvWeights<T> xavier_init(const ConvSpec& spec, Rng& rng) {
  spec.validate();
  const double a = xavier_bound(spec);
  ConvWeights<T> w{Tensor4<T>(spec.weight_shape()), {}};
  for (std::size_t i = 0; i < w.kernels.size(); ++i) {
    w.kernels[i] = static_cast<T>(rng.uniform(-a, a));
  }
  if (spec.bias) w.bias.assign(spec.c_out, T(0));
  return w;
}

template void adam_step(ParamStore<float>&, AdamState<float>&);
template void adam_step(ParamStore<double>&, AdamState<double>&);
template ConvWeights<float> xavier_init(const ConvSpec&, Rng&);
template ConvWeights<double> xavier_init(const ConvSpec&, Rng&);

}  // namespace minet::ad
