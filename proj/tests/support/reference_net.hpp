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
#include <vector>

#include "minet/model.hpp"

namespace minet::testing {

/// Single image, channel-major planes.
struct RefImage {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  RefImage() = default;
  RefImage(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, 0.0) {}
  double& at(int ch, int y, int x) { return v[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
  double at(int ch, int y, int x) const { return v[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
};

RefImage ref_conv(const RefImage& in, const Tensor4<double>& weight, const Tensor4<double>* bias,
                  int stride, int dilation, int pad, int groups);
RefImage ref_resize(const RefImage& in, int oh, int ow);

/// Inference-mode forward of the whole network with plain loops; every
/// layer is re-derived from the parameter names, nothing is shared with
/// the library kernels.
std::array<RefImage, 5> reference_forward(const Network<double>& net, const RefImage& x);
std::array<RefImage, 5> reference_backbone(const Network<double>& net, const RefImage& x);

RefImage to_ref(const Tensor4<double>& t);  // batch item 0

}  // namespace minet::testing
