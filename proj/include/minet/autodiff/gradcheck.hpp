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
#include <functional>
#include <string>
#include <vector>

#include "minet/autodiff/param_store.hpp"
#include "minet/autodiff/tape.hpp"

namespace minet::ad {

struct TensorCheck {
  std::string name;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<TensorCheck> tensors;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// |a - n| / max(|a|, |n|, 1e-3). The floor turns the measure into an
/// absolute one for near-zero gradients, where central differences are
/// dominated by cancellation.
double relative_error(double analytic, double numeric);

/// Compares the gradients already stored in params (the analytic side)
/// against central differences (f(p + eps) - f(p - eps)) / (2 eps). At most
/// max_coords coordinates per tensor are probed, chosen with the seed.
/// Parameter values are restored exactly after each probe.
template <typename T>
GradCheckReport finite_diff_check(const std::function<T(ParamStore<T>&)>& f,
                                  ParamStore<T>& params, double eps, double tol,
                                  std::uint64_t seed = 0, std::size_t max_coords = 256);

/// Graph form: zeroes the gradients, records build() on a fresh tape, runs
/// backward, then finite-differences build() on non-recording tapes.
template <typename T>
GradCheckReport check_graph(const std::function<Var<T>(Tape<T>&, ParamStore<T>&)>& build,
                            ParamStore<T>& params, double eps, double tol,
                            std::uint64_t seed = 0, std::size_t max_coords = 256);

}  // namespace minet::ad
