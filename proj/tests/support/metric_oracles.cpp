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


#include "metric_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minet::testing {

namespace {

constexpr double kEps = 2.220446049250313e-16;

bool fg(const Map& g, int y, int x) { return g(0, 0, y, x) >= 0.5; }

struct Px {
  int y, x;
};

double mean(const std::vector<double>& v) {
  double a = 0;
  for (double x : v) a += x;
  return a / static_cast<double>(v.size());
}

double object(const std::vector<double>& v) {
  const double x = mean(v);
  double sigma = 0;
  if (v.size() > 1) {
    double ss = 0;
    for (double a : v) ss += (a - x) * (a - x);
    sigma = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return 2 * x / (x * x + 1 + sigma + kEps);
}

double ssim_block(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double x = mean(a), y = mean(b);
  double sx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sx += (a[i] - x) * (a[i] - x);
    sy += (b[i] - y) * (b[i] - y);
    sxy += (a[i] - x) * (b[i] - y);
  }
  sx /= (n - 1 + kEps);
  sy /= (n - 1 + kEps);
  sxy /= (n - 1 + kEps);
  const double alpha = 4 * x * y * sxy;
  const double beta = (x * x + y * y) * (sx + sy);
  if (alpha != 0) return alpha / (beta + kEps);
  if (beta == 0) return 1;
  return 0;
}

std::vector<Px> boundary(const std::vector<std::vector<bool>>& m) {
  const int h = static_cast<int>(m.size()), w = static_cast<int>(m[0].size());
  std::vector<Px> out;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!m[y][x]) continue;
      const int ny[4] = {y - 1, y + 1, y, y};
      const int nx[4] = {x, x, x - 1, x + 1};
      bool edge = false;
      for (int k = 0; k < 4; ++k) {
        const bool inside = ny[k] >= 0 && ny[k] < h && nx[k] >= 0 && nx[k] < w;
        if (!inside || !m[ny[k]][nx[k]]) edge = true;
      }
      if (edge) out.push_back({y, x});
    }
  return out;
}

}  // namespace

OracleCounts oracle_counts(const Map& s, const Map& g, double t) {
  OracleCounts c;
  for (int y = 0; y < s.h(); ++y)
    for (int x = 0; x < s.w(); ++x) {
      const bool b = s(0, 0, y, x) >= t;
      const bool gg = fg(g, y, x);
      if (b && gg) ++c.tp;
      if (b && !gg) ++c.fp;
      if (!b && gg) ++c.fn;
    }
  return c;
}

double oracle_precision(const OracleCounts& c, bool g_empty) {
  if (c.tp + c.fp == 0) return g_empty ? 1.0 : 0.0;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double oracle_recall(const OracleCounts& c, bool b_empty) {
  if (c.tp + c.fn == 0) return b_empty ? 1.0 : 0.0;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double oracle_f(double p, double r) {
  if (0.3 * p + r == 0) return 0;
  return (1 + 0.3) * p * r / (0.3 * p + r);
}

double oracle_iou(const OracleCounts& c) {
  const auto u = c.tp + c.fp + c.fn;
  return u == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(u);
}

double oracle_s_measure(const Map& s, const Map& g) {
  const int h = s.h(), w = s.w();
  std::vector<double> all;
  double count = 0, sx = 0, sy = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      all.push_back(s(0, 0, y, x));
      if (fg(g, y, x)) {
        count += 1;
        sx += x;
        sy += y;
      }
    }
  if (count == 0) return 1 - mean(all);
  if (count == h * w) return mean(all);

  std::vector<double> fg_vals, bg_vals;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (fg(g, y, x)) fg_vals.push_back(s(0, 0, y, x));
      else bg_vals.push_back(1 - s(0, 0, y, x));
    }
  const double u = count / (h * w);
  const double so = u * object(fg_vals) + (1 - u) * object(bg_vals);

  const int X = static_cast<int>(std::floor(sx / count));  // last left column
  const int Y = static_cast<int>(std::floor(sy / count));  // last top row
  double sr = 0;
  for (int q = 0; q < 4; ++q) {
    std::vector<double> a, b;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const bool top = y <= Y, left = x <= X;
        const int quad = (top ? 0 : 2) + (left ? 0 : 1);
        if (quad != q) continue;
        a.push_back(s(0, 0, y, x));
        b.push_back(fg(g, y, x) ? 1.0 : 0.0);
      }
    if (a.empty()) continue;
    sr += static_cast<double>(a.size()) / (h * w) * ssim_block(a, b);
  }
  return std::max(0.0, 0.5 * so + 0.5 * sr);
}

double oracle_weighted_f(const Map& s, const Map& g) {
  const int h = s.h(), w = s.w();
  std::vector<Px> fgs;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (fg(g, y, x)) fgs.push_back({y, x});
  if (fgs.empty()) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (s(0, 0, y, x) != 0) return 0.0;
    return 1.0;
  }
  auto E = [&](int y, int x) { return std::abs(s(0, 0, y, x) - (fg(g, y, x) ? 1.0 : 0.0)); };

  // dist[p][q] for every pixel p and foreground pixel q.
  const int n = h * w;
  std::vector<std::vector<double>> dist(n, std::vector<double>(fgs.size()));
  for (int p = 0; p < n; ++p)
    for (std::size_t q = 0; q < fgs.size(); ++q) {
      const double dy = p / w - fgs[q].y, dx = p % w - fgs[q].x;
      dist[p][q] = std::sqrt(dy * dy + dx * dx);
    }
  std::vector<double> et(n), dmin(n);
  for (int p = 0; p < n; ++p) {
    const int y = p / w, x = p % w;
    const double best = *std::min_element(dist[p].begin(), dist[p].end());
    dmin[p] = best;
    if (fg(g, y, x)) {
      et[p] = E(y, x);
      continue;
    }
    double acc = 0;
    int cnt = 0;
    for (std::size_t q = 0; q < fgs.size(); ++q) {
      if (dist[p][q] == best) {
        acc += E(fgs[q].y, fgs[q].x);
        ++cnt;
      }
    }
    et[p] = acc / cnt;
  }
  double K[7][7], ks = 0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      K[i][j] = std::exp(-((i - 3) * (i - 3) + (j - 3) * (j - 3)) / (2.0 * 25.0));
      ks += K[i][j];
    }
  double tp_w = static_cast<double>(fgs.size()), fp_w = 0, ew_fg = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int p = y * w + x;
      if (fg(g, y, x)) {
        double ea = 0;
        for (int i = 0; i < 7; ++i)
          for (int j = 0; j < 7; ++j) {
            const int yy = y + i - 3, xx = x + j - 3;
            if (yy >= 0 && yy < h && xx >= 0 && xx < w) ea += K[i][j] / ks * et[yy * w + xx];
          }
        const double v = std::min(E(y, x), ea);
        ew_fg += v;
        tp_w -= v;
      } else {
        fp_w += E(y, x) * (2 - std::exp(std::log(0.5) / 5 * dmin[p]));
      }
    }
  const double R = 1 - ew_fg / static_cast<double>(fgs.size());
  const double P = tp_w / (kEps + tp_w + fp_w);
  return 2 * R * P / (kEps + R + P);
}

double oracle_pfom(const Map& s, const Map& g) {
  const int h = s.h(), w = s.w();
  std::vector<std::vector<bool>> bs(h, std::vector<bool>(w)), bg(h, std::vector<bool>(w));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bs[y][x] = s(0, 0, y, x) >= 0.5;
      bg[y][x] = g(0, 0, y, x) >= 0.5;
    }
  const auto ed = boundary(bs), eg = boundary(bg);
  if (eg.empty()) return ed.empty() ? 1.0 : 0.0;
  double acc = 0;
  for (const auto& p : ed) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : eg) {
      const double d2 = double(p.y - q.y) * (p.y - q.y) + double(p.x - q.x) * (p.x - q.x);
      best = std::min(best, d2);
    }
    acc += 1.0 / (1.0 + best / 9.0);
  }
  return acc / static_cast<double>(std::max(ed.size(), eg.size()));
}

std::pair<Map, Map> random_pair(int h, int w, Rng& rng) {
  Map s(Shape4{1, 1, h, w}), g(Shape4{1, 1, h, w}, 0.0);
  const double mode = rng.uniform();
  if (mode < 0.05) {
    // empty ground truth
  } else if (mode < 0.08) {
    g.fill(1.0);
  } else {
    const int blobs = 1 + static_cast<int>(rng.below(3));
    for (int b = 0; b < blobs; ++b) {
      const double cy = rng.uniform(0, h), cx = rng.uniform(0, w);
      const double r = rng.uniform(0.8, h / 2.5);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r) g(0, 0, y, x) = 1;
    }
  }
  const double agree = rng.uniform(0.3, 0.95);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = rng.bernoulli(agree) ? (g(0, 0, y, x) > 0 ? rng.uniform(0.5, 1) : rng.uniform(0, 0.5))
                                      : rng.uniform();
      if (rng.bernoulli(0.3)) v = static_cast<double>(rng.below(256)) / 255.0;
      s(0, 0, y, x) = v;
    }
  return {s, g};
}

}  // namespace minet::testing
