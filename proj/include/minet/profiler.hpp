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
#include <string>
#include <vector>

#include "minet/model.hpp"

namespace minet::profile {

/// k^2 c w h + c^2 w h.
std::uint64_t cost_dsconv(std::uint64_t k, std::uint64_t c, std::uint64_t w, std::uint64_t h);
/// 4 k^2 c w h + 4 c w h + c^2 w h.
std::uint64_t cost_mi(std::uint64_t k, std::uint64_t c, std::uint64_t w, std::uint64_t h);
/// 4 (k^2 c w h + c^2 w h).
std::uint64_t cost_mi_dsconv_variant(std::uint64_t k, std::uint64_t c, std::uint64_t w,
                                     std::uint64_t h);

struct CostRow {
  std::string name;
  std::string type;
  std::size_t params = 0;
  std::uint64_t macs = 0;
  std::uint64_t elements = 0;
};

struct CostReport {
  std::vector<CostRow> rows;
  int height = 0;
  int width = 0;
  MIVariant variant = MIVariant::Standard;
  std::size_t trainable_params = 0;  // conv weights/biases + BN gamma/beta
  std::size_t running_params = 0;    // BN running mean/var
  std::uint64_t macs = 0;            // convolutions only
  std::uint64_t bn_elements = 0;
  std::uint64_t activation_elements = 0;
  std::uint64_t add_elements = 0;
  std::uint64_t resize_elements = 0;

  std::size_t total_params() const { return trainable_params + running_params; }
  std::string to_csv() const;
  std::string to_json() const;
};

/// Closed-form accounting from the network's static layer plan.
template <typename T>
CostReport count_params(const Network<T>& net);

template <typename T>
CostReport count_macs(const Network<T>& net, int h, int w);

/// Per-layer MACs recorded by the convolution kernels during one inference.
template <typename T>
std::map<std::string, std::uint64_t> instrumented_macs(Network<T>& net, int h, int w);

struct MacCheck {
  bool match = false;
  std::uint64_t analytic = 0;
  std::uint64_t instrumented = 0;
  std::vector<std::string> mismatches;
};

template <typename T>
MacCheck verify_macs(Network<T>& net, int h, int w);

struct LatencyStats {
  std::vector<double> samples_ms;
  double mean_ms = 0;
  double p50_ms = 0;
  double p95_ms = 0;
  std::uint64_t macs = 0;
  int threads = 1;

  std::string to_json() const;
};

/// Single-image inference timing after warmup runs; repeats must be >= 10.
template <typename T>
LatencyStats latency_bench(Network<T>& net, int h, int w, int repeats, int warmup = 2);

/// Linear-interpolated percentile of unsorted samples, q in [0,1].
double percentile(std::vector<double> samples, double q);

}  // namespace minet::profile
