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


#include <algorithm>
#include <limits>

#include "minet/metrics.hpp"

namespace minet::metrics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas over one line (Felzenszwalb & Huttenlocher).
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    while (k >= 0) {
      const int p = v[k];
      const double s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -kInf : ((f[q] + double(q) * q) - (f[v[k - 1]] + double(v[k - 1]) * v[k - 1])) /
                                (2.0 * (q - v[k - 1]));
    z[k + 1] = kInf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) d[q] = kInf;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double diff = q - v[j];
    d[q] = diff * diff + f[v[j]];
  }
}

}  // namespace

std::vector<double> squared_edt(std::span<const std::uint8_t> fg, int h, int w) {
  if (fg.size() != static_cast<std::size_t>(h) * w) {
    throw ShapeError("squared_edt: mask size does not match " + std::to_string(h) + "x" +
                     std::to_string(w));
  }
  std::vector<double> out(fg.size());
  for (std::size_t i = 0; i < fg.size(); ++i) out[i] = fg[i] ? 0.0 : kInf;
  const int n = std::max(h, w);
  std::vector<int> v(n + 1);
  std::vector<double> z(n + 2), f(n), d(n);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = out[static_cast<std::size_t>(y) * w + x];
    edt_1d(f.data(), d.data(), h, v, z);
    for (int y = 0; y < h; ++y) out[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  for (int y = 0; y < h; ++y) {
    double* row = out.data() + static_cast<std::size_t>(y) * w;
    std::copy(row, row + w, f.begin());
    edt_1d(f.data(), d.data(), w, v, z);
    std::copy(d.begin(), d.begin() + w, row);
  }
  return out;
}

std::vector<std::uint8_t> boundary4(std::span<const std::uint8_t> mask, int h, int w) {
  if (mask.size() != static_cast<std::size_t>(h) * w) {
    throw ShapeError("boundary4: mask size does not match " + std::to_string(h) + "x" +
                     std::to_string(w));
  }
  std::vector<std::uint8_t> out(mask.size(), 0);
  auto at = [&](int y, int x) -> bool {
    return y >= 0 && y < h && x >= 0 && x < w && mask[static_cast<std::size_t>(y) * w + x];
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!at(y, x)) continue;
      if (!at(y - 1, x) || !at(y + 1, x) || !at(y, x - 1) || !at(y, x + 1)) {
        out[static_cast<std::size_t>(y) * w + x] = 1;
      }
    }
  return out;
}

std::vector<std::uint8_t> binarize(const Map& m, double t) {
  std::vector<std::uint8_t> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m.data()[i] >= t ? 1 : 0;
  return out;
}

}  // namespace minet::metrics
