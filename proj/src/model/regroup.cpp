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

#include <cstring>

#include "minet/model.hpp"

namespace minet {

template <typename T>
Tensor4<T> regroup_channels(std::span<const Tensor4<T>> four) {
  if (four.size() != 4) {
    throw ShapeError("regroup_channels expects 4 inputs, got " + std::to_string(four.size()));
  }
  const Shape4 s = four[0].shape();
  for (const auto& t : four) {
    if (t.shape() != s) {
      throw ShapeError("regroup_channels: shape " + t.shape().str() + " differs from " + s.str());
    }
  }
  Tensor4<T> out(Shape4{s.n, 4 * s.c, s.h, s.w});
  for (int b = 0; b < s.n; ++b)
    for (int j = 0; j < s.c; ++j)
      for (int i = 0; i < 4; ++i)
        std::memcpy(out.plane(b, 4 * j + i), four[i].plane(b, j), sizeof(T) * s.plane());
  return out;
}

template <typename T>
std::array<Tensor4<T>, 4> ungroup_channels(const Tensor4<T>& x) {
  if (x.c() % 4 != 0) {
    throw ShapeError("ungroup_channels: channel count " + std::to_string(x.c()) +
                     " is not a multiple of 4");
  }
  const int c = x.c() / 4;
  std::array<Tensor4<T>, 4> parts;
  for (auto& p : parts) p = Tensor4<T>(Shape4{x.n(), c, x.h(), x.w()});
  for (int b = 0; b < x.n(); ++b)
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < 4; ++i)
        std::memcpy(parts[i].plane(b, j), x.plane(b, 4 * j + i), sizeof(T) * x.shape().plane());
  return parts;
}

std::vector<int> regroup_source_channels(int c) {
  std::vector<int> src(4 * static_cast<std::size_t>(c));
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < 4; ++i) src[4 * j + i] = i * c + j;
  return src;
}

template <typename T>
ad::Var<T> regroup(ad::Tape<T>& tape, const std::vector<ad::Var<T>>& four) {
  if (four.size() != 4) {
    throw ShapeError("regroup expects 4 inputs, got " + std::to_string(four.size()));
  }
  for (const auto& v : four) {
    if (v->value.shape() != four[0]->value.shape()) {
      throw ShapeError("regroup: shape " + v->value.shape().str() + " differs from " +
                       four[0]->value.shape().str());
    }
  }
  const int c = four[0]->value.c();
  return ad::gather_channels(tape, ad::concat(tape, four), regroup_source_channels(c));
}

template Tensor4<float> regroup_channels(std::span<const Tensor4<float>>);
template Tensor4<double> regroup_channels(std::span<const Tensor4<double>>);
template std::array<Tensor4<float>, 4> ungroup_channels(const Tensor4<float>&);
template std::array<Tensor4<double>, 4> ungroup_channels(const Tensor4<double>&);
template ad::Var<float> regroup(ad::Tape<float>&, const std::vector<ad::Var<float>>&);
template ad::Var<double> regroup(ad::Tape<double>&, const std::vector<ad::Var<double>>&);

}  // namespace minet
