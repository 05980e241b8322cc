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


#include "minet/profiler.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "minet/parallel.hpp"

namespace minet::profile {

namespace {

void check_args(std::uint64_t k, std::uint64_t c, std::uint64_t w, std::uint64_t h) {
  if (k < 1 || c < 1 || w < 1 || h < 1) throw std::invalid_argument("cost arguments must be >= 1");
}

}  // namespace

std::uint64_t cost_dsconv(std::uint64_t k, std::uint64_t c, std::uint64_t w, std::uint64_t h) {
  check_args(k, c, w, h);
  return k * k * c * w * h + c * c * w * h;
}

std::uint64_t cost_mi(std::uint64_t k, std::uint64_t c, std::uint64_t w, std::uint64_t h) {
  check_args(k, c, w, h);
  return 4 * k * k * c * w * h + 4 * c * w * h + c * c * w * h;
}

std::uint64_t cost_mi_dsconv_variant(std::uint64_t k, std::uint64_t c, std::uint64_t w,
                                     std::uint64_t h) {
  check_args(k, c, w, h);
  return 4 * (k * k * c * w * h + c * c * w * h);
}

std::string CostReport::to_csv() const {
  std::ostringstream out;
  out << "name,type,params,macs\n";
  for (const auto& r : rows) out << r.name << ',' << r.type << ',' << r.params << ',' << r.macs << '\n';
  return out.str();
}

std::string CostReport::to_json() const {
  nlohmann::ordered_json j;
  j["variant"] = std::string(variant_name(variant));
  j["input"] = {height, width};
  j["trainable_params"] = trainable_params;
  j["running_params"] = running_params;
  j["total_params"] = total_params();
  j["macs"] = macs;
  j["flops_2x"] = 2 * macs;
  j["bn_elements"] = bn_elements;
  j["activation_elements"] = activation_elements;
  j["add_elements"] = add_elements;
  j["resize_elements"] = resize_elements;
  j["layers"] = rows.size();
  return j.dump(2);
}

template <typename T>
CostReport count_macs(const Network<T>& net, int h, int w) {
  CostReport r;
  r.height = h;
  r.width = w;
  r.variant = net.config().variant;
  for (const LayerInfo& l : net.describe(h, w)) {
    CostRow row{l.name, std::string(layer_kind_name(l.kind)), l.params, l.macs, l.elements};
    switch (l.kind) {
      case LayerKind::Conv: r.macs += l.macs; break;
      case LayerKind::BatchNorm:
        r.bn_elements += l.elements;
        r.running_params += 2 * static_cast<std::size_t>(l.channels);
        break;
      case LayerKind::ReLU:
      case LayerKind::Sigmoid: r.activation_elements += l.elements; break;
      case LayerKind::Add: r.add_elements += l.elements; break;
      case LayerKind::Resize: r.resize_elements += l.elements; break;
    }
    r.trainable_params += l.params;
    r.rows.push_back(std::move(row));
  }
  return r;
}

template <typename T>
CostReport count_params(const Network<T>& net) {
  const int s = net.config().input_size;
  return count_macs(net, s, s);
}

template <typename T>
std::map<std::string, std::uint64_t> instrumented_macs(Network<T>& net, int h, int w) {
  MacRecorder rec;
  Tensor4<T> x(Shape4{1, net.config().input_channels, h, w}, T(0));
  net.predict(x);
  return rec.per_layer();
}

template <typename T>
MacCheck verify_macs(Network<T>& net, int h, int w) {
  const CostReport analytic = count_macs(net, h, w);
  const auto measured = instrumented_macs(net, h, w);
  MacCheck c;
  c.analytic = analytic.macs;
  for (const auto& [name, m] : measured) c.instrumented += m;
  std::size_t conv_rows = 0;
  for (const auto& row : analytic.rows) {
    if (row.type != "conv") continue;
    ++conv_rows;
    auto it = measured.find(row.name);
    const std::uint64_t got = it == measured.end() ? 0 : it->second;
    if (got != row.macs) {
      c.mismatches.push_back(row.name + ": analytic " + std::to_string(row.macs) +
                             ", instrumented " + std::to_string(got));
    }
  }
  if (measured.size() != conv_rows) {
    c.mismatches.push_back("layer count: analytic " + std::to_string(conv_rows) +
                           ", instrumented " + std::to_string(measured.size()));
  }
  c.match = c.mismatches.empty() && c.analytic == c.instrumented;
  return c;
}

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("percentile of no samples");
  std::sort(samples.begin(), samples.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (pos - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

std::string LatencyStats::to_json() const {
  nlohmann::ordered_json j;
  j["repeats"] = samples_ms.size();
  j["mean_ms"] = mean_ms;
  j["p50_ms"] = p50_ms;
  j["p95_ms"] = p95_ms;
  j["fps"] = mean_ms > 0 ? 1000.0 / mean_ms : 0.0;
  j["macs"] = macs;
  j["threads"] = threads;
  j["samples_ms"] = samples_ms;
  return j.dump(2);
}

template <typename T>
LatencyStats latency_bench(Network<T>& net, int h, int w, int repeats, int warmup) {
  if (repeats < 10) throw std::invalid_argument("latency_bench needs repeats >= 10");
  Rng rng(1);
  Tensor4<T> x(Shape4{1, net.config().input_channels, h, w});
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = static_cast<T>(rng.normal());
  for (int i = 0; i < std::max(1, warmup); ++i) net.predict(x);
  LatencyStats s;
  s.threads = thread_count();
  s.macs = count_macs(net, h, w).macs;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    net.predict(x);
    const auto t1 = std::chrono::steady_clock::now();
    s.samples_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  double sum = 0;
  for (double v : s.samples_ms) sum += v;
  s.mean_ms = sum / static_cast<double>(repeats);
  s.p50_ms = percentile(s.samples_ms, 0.5);
  s.p95_ms = percentile(s.samples_ms, 0.95);
  return s;
}

#define MINET_INSTANTIATE(T)                                                                  \
  template CostReport count_params(const Network<T>&);                                        \
  template CostReport count_macs(const Network<T>&, int, int);                                \
  template std::map<std::string, std::uint64_t> instrumented_macs(Network<T>&, int, int);     \
  template MacCheck verify_macs(Network<T>&, int, int);                                       \
  template LatencyStats latency_bench(Network<T>&, int, int, int, int);

MINET_INSTANTIATE(float)
MINET_INSTANTIATE(double)

}  // namespace minet::profile
