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
#include <string>
#include <vector>

#include "minet/autodiff/gradcheck.hpp"

namespace minet {

struct GradSuiteOptions {
  std::uint64_t seed = 0;
  double eps = 1e-6;
  double tolerance = 1e-5;
  std::size_t max_coords = 256;
};

struct GradFamilyResult {
  std::string family;
  ad::GradCheckReport report;
};

/// Finite-difference checks, in 64-bit, of every differentiable op family,
/// the three losses and the MI module in all variants, on seeded tensors no
/// larger than 1x8x8x8 (12x12 maps for the SSIM-based losses).
std::vector<GradFamilyResult> gradcheck_suite(const GradSuiteOptions& opts = {});

}  // namespace minet
