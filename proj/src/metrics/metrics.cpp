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
#include <array>
#include <cmath>

#include "minet/metrics.hpp"

namespace minet::metrics {

namespace {

void check_maps(const Map& s, const Map& g, const char* what) {
  if (!(s.shape() == g.shape())) {
    throw ShapeError(std::string(what) + ": shape mismatch " + s.shape().str() + " vs " +
                     g.shape().str());
  }
  if (s.n() != 1 || s.c() != 1) {
    throw ShapeError(std::string(what) + ": expects a single (1,1,h,w) map, got " +
                     s.shape().str());
  }
}

double mean_of(const Map& m) {
  double acc = 0;
  for (std::size_t i = 0; i < m.size(); ++i) acc += m.data()[i];
  return acc / static_cast<double>(m.size());
}

// Largest k in [0,255] with v >= k/255, or -1 when v < 0.
int threshold_index(double v) {
  int k = static_cast<int>(std::floor(v * 255.0));
  k = std::clamp(k, -1, 255);
  while (k < 255 && v >= (k + 1) / 255.0) ++k;
  while (k >= 0 && v < k / 255.0) --k;
  return k;
}

struct Counts {
  std::uint64_t tp = 0, predicted = 0, positives = 0;
};

Counts count_at(const Map& s, const std::vector<std::uint8_t>& gt, double t) {
  Counts c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool b = s.data()[i] >= t;
    c.predicted += b;
    c.positives += gt[i];
    c.tp += b && gt[i];
  }
  return c;
}

double overlap(const Counts& c) {
  const std::uint64_t uni = c.predicted + c.positives - c.tp;
  return uni == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(uni);
}

double object_score(const std::vector<double>& vals) {
  if (vals.empty()) return 0;
  double mean = 0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double sigma = 0;
  if (vals.size() > 1) {
    double ss = 0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    sigma = std::sqrt(ss / static_cast<double>(vals.size() - 1));
  }
  return 2.0 * mean / (mean * mean + 1.0 + sigma + kEps);
}

double region_ssim(const Map& s, const std::vector<std::uint8_t>& gt, int w, int y0, int y1,
                   int x0, int x1) {
  const double n = static_cast<double>(y1 - y0) * (x1 - x0);
  double mx = 0, my = 0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      mx += s.data()[i];
      my += gt[i];
    }
  mx /= n;
  my /= n;
  double vx = 0, vy = 0, cxy = 0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double dx = s.data()[i] - mx, dy = gt[i] - my;
      vx += dx * dx;
      vy += dy * dy;
      cxy += dx * dy;
    }
  vx /= n - 1 + kEps;
  vy /= n - 1 + kEps;
  cxy /= n - 1 + kEps;
  const double alpha = 4 * mx * my * cxy;
  const double beta = (mx * mx + my * my) * (vx + vy);
  if (alpha != 0) return alpha / (beta + kEps);
  return beta == 0 ? 1.0 : 0.0;
}

}  // namespace

double MetricsReport::max_f() const {
  double best = 0;
  for (const auto& p : fm_curve) best = std::max(best, p.fmeasure);
  return best;
}

double MetricsReport::mean_f() const {
  if (fm_curve.empty()) return 0;
  double acc = 0;
  for (const auto& p : fm_curve) acc += p.fmeasure;
  return acc / static_cast<double>(fm_curve.size());
}

double mae(const Map& s, const Map& g) {
  check_maps(s, g, "mae");
  double acc = 0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += std::abs(s.data()[i] - g.data()[i]);
  return acc / static_cast<double>(s.size());
}

SetScores set_scores(std::uint64_t tp, std::uint64_t predicted, std::uint64_t positives,
                     std::uint64_t union_count) {
  SetScores r;
  r.precision = predicted == 0 ? (positives == 0 ? 1.0 : 0.0)
                               : static_cast<double>(tp) / static_cast<double>(predicted);
  r.recall = positives == 0 ? (predicted == 0 ? 1.0 : 0.0)
                            : static_cast<double>(tp) / static_cast<double>(positives);
  const double den = kCurveBeta2 * r.precision + r.recall;
  r.fmeasure = den == 0 ? 0.0 : (1 + kCurveBeta2) * r.precision * r.recall / den;
  r.iou = union_count == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(union_count);
  return r;
}

ThresholdMetrics threshold_metrics(const Map& s, const Map& g) {
  check_maps(s, g, "threshold_metrics");
  const auto gt = binarize(g, 0.5);
  std::array<std::uint64_t, kCurvePoints> hist_fg{}, hist_all{};
  std::uint64_t positives = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    positives += gt[i];
    const int k = threshold_index(s.data()[i]);
    if (k < 0) continue;
    ++hist_all[k];
    if (gt[i]) ++hist_fg[k];
  }
  ThresholdMetrics r;
  r.pr_curve.resize(kCurvePoints);
  r.fm_curve.resize(kCurvePoints);
  std::uint64_t tp = 0, predicted = 0;
  for (int k = kCurvePoints - 1; k >= 0; --k) {
    tp += hist_fg[k];
    predicted += hist_all[k];
    const SetScores sc = set_scores(tp, predicted, positives, predicted + positives - tp);
    const double t = k / 255.0;
    r.pr_curve[k] = {t, sc.precision, sc.recall};
    r.fm_curve[k] = {t, sc.fmeasure};
  }
  r.iou = overlap(count_at(s, gt, 0.5));
  r.or_score = overlap(count_at(s, gt, std::min(2.0 * mean_of(s), 1.0)));
  return r;
}

double s_measure(const Map& s, const Map& g) {
  check_maps(s, g, "s_measure");
  const int h = s.h(), w = s.w();
  const auto gt = binarize(g, 0.5);
  std::uint64_t area = 0;
  double sum_x = 0, sum_y = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (gt[static_cast<std::size_t>(y) * w + x]) {
        ++area;
        sum_x += x;
        sum_y += y;
      }
  const double total = static_cast<double>(s.size());
  if (area == 0) return 1.0 - mean_of(s);
  if (area == s.size()) return mean_of(s);

  std::vector<double> fg, bg;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (gt[i]) fg.push_back(s.data()[i]);
    else bg.push_back(1.0 - s.data()[i]);
  }
  const double u = static_cast<double>(area) / total;
  const double object = u * object_score(fg) + (1 - u) * object_score(bg);

  const int cx = static_cast<int>(std::floor(sum_x / static_cast<double>(area))) + 1;
  const int cy = static_cast<int>(std::floor(sum_y / static_cast<double>(area))) + 1;
  const std::array<std::array<int, 4>, 4> quads{{{0, cy, 0, cx},
                                                 {0, cy, cx, w},
                                                 {cy, h, 0, cx},
                                                 {cy, h, cx, w}}};
  double region = 0;
  for (const auto& q : quads) {
    const double a = static_cast<double>(q[1] - q[0]) * (q[3] - q[2]);
    if (a <= 0) continue;
    region += a / total * region_ssim(s, gt, w, q[0], q[1], q[2], q[3]);
  }
  return std::max(0.0, 0.5 * object + 0.5 * region);
}

double weighted_f(const Map& s, const Map& g) {
  check_maps(s, g, "weighted_f");
  const int h = s.h(), w = s.w();
  const std::size_t n = s.size();
  const auto gt = binarize(g, 0.5);
  std::size_t positives = 0;
  for (auto v : gt) positives += v;
  if (positives == 0) {
    for (std::size_t i = 0; i < n; ++i)
      if (s.data()[i] != 0) return 0.0;
    return 1.0;
  }
  std::vector<double> err(n);
  for (std::size_t i = 0; i < n; ++i) err[i] = std::abs(s.data()[i] - gt[i]);
  const auto d2 = squared_edt(gt, h, w);

  // Background pixels inherit the error of their nearest foreground pixels.
  std::vector<double> et = err;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (gt[i]) continue;
      const long r2 = std::lround(d2[i]);
      const int r = static_cast<int>(std::sqrt(static_cast<double>(r2)));
      double acc = 0;
      int cnt = 0;
      for (int dy = -r - 1; dy <= r + 1; ++dy) {
        const long rem = r2 - static_cast<long>(dy) * dy;
        if (rem < 0) continue;
        long dx = std::lround(std::sqrt(static_cast<double>(rem)));
        if (dx * dx != rem) continue;
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        for (long sx : {-dx, dx}) {
          const long xx = x + sx;
          if (xx >= 0 && xx < w && gt[static_cast<std::size_t>(yy) * w + xx]) {
            acc += err[static_cast<std::size_t>(yy) * w + xx];
            ++cnt;
          }
          if (dx == 0) break;
        }
      }
      et[i] = acc / cnt;
    }

  std::array<double, kWfWindow * kWfWindow> kernel{};
  double ksum = 0;
  const int half = kWfWindow / 2;
  for (int ky = 0; ky < kWfWindow; ++ky)
    for (int kx = 0; kx < kWfWindow; ++kx) {
      const double dy = ky - half, dx = kx - half;
      kernel[ky * kWfWindow + kx] = std::exp(-(dx * dx + dy * dy) / (2 * kWfSigma * kWfSigma));
      ksum += kernel[ky * kWfWindow + kx];
    }
  for (auto& v : kernel) v /= ksum;

  double sum_ew_fg = 0, sum_ew_bg = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      double ew;
      if (gt[i]) {
        double ea = 0;
        for (int ky = 0; ky < kWfWindow; ++ky) {
          const int yy = y + ky - half;
          if (yy < 0 || yy >= h) continue;
          for (int kx = 0; kx < kWfWindow; ++kx) {
            const int xx = x + kx - half;
            if (xx < 0 || xx >= w) continue;
            ea += kernel[ky * kWfWindow + kx] * et[static_cast<std::size_t>(yy) * w + xx];
          }
        }
        ew = std::min(err[i], ea);
        sum_ew_fg += ew;
      } else {
        const double b = 2.0 - std::exp(std::log(0.5) / 5.0 * std::sqrt(d2[i]));
        ew = err[i] * b;
        sum_ew_bg += ew;
      }
    }
  const double tpw = static_cast<double>(positives) - sum_ew_fg;
  const double fpw = sum_ew_bg;
  const double recall = 1.0 - sum_ew_fg / static_cast<double>(positives);
  const double precision = tpw / (kEps + tpw + fpw);
  return (1 + kWfBeta2) * recall * precision / (kEps + recall + kWfBeta2 * precision);
}

double pfom(const Map& s, const Map& g) {
  check_maps(s, g, "pfom");
  const int h = s.h(), w = s.w();
  const auto ed = boundary4(binarize(s, 0.5), h, w);
  const auto eg = boundary4(binarize(g, 0.5), h, w);
  std::size_t nd = 0, ng = 0;
  for (std::size_t i = 0; i < ed.size(); ++i) {
    nd += ed[i];
    ng += eg[i];
  }
  if (ng == 0) return nd == 0 ? 1.0 : 0.0;
  const auto d2 = squared_edt(eg, h, w);
  double acc = 0;
  for (std::size_t i = 0; i < ed.size(); ++i) {
    if (ed[i]) acc += 1.0 / (1.0 + kPfomAlpha * d2[i]);
  }
  return acc / static_cast<double>(std::max(nd, ng));
}

MetricsReport evaluate_pair(const Map& s, const Map& g) {
  MetricsReport r;
  r.mae = mae(s, g);
  ThresholdMetrics t = threshold_metrics(s, g);
  r.iou = t.iou;
  r.or_score = t.or_score;
  r.pr_curve = std::move(t.pr_curve);
  r.fm_curve = std::move(t.fm_curve);
  r.sm = s_measure(s, g);
  r.wf = weighted_f(s, g);
  r.pfom = pfom(s, g);
  return r;
}

MetricsReport mean_report(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw std::invalid_argument("mean_report: no reports");
  MetricsReport m;
  m.pr_curve.resize(kCurvePoints);
  m.fm_curve.resize(kCurvePoints);
  for (int k = 0; k < kCurvePoints; ++k) {
    m.pr_curve[k].threshold = k / 255.0;
    m.fm_curve[k].threshold = k / 255.0;
  }
  for (const auto& r : reports) {
    m.mae += r.mae;
    m.wf += r.wf;
    m.or_score += r.or_score;
    m.sm += r.sm;
    m.pfom += r.pfom;
    m.iou += r.iou;
    for (int k = 0; k < kCurvePoints; ++k) {
      m.pr_curve[k].precision += r.pr_curve[k].precision;
      m.pr_curve[k].recall += r.pr_curve[k].recall;
      m.fm_curve[k].fmeasure += r.fm_curve[k].fmeasure;
    }
  }
  const double n = static_cast<double>(reports.size());
  for (double* v : {&m.mae, &m.wf, &m.or_score, &m.sm, &m.pfom, &m.iou}) *v /= n;
  for (int k = 0; k < kCurvePoints; ++k) {
    m.pr_curve[k].precision /= n;
    m.pr_curve[k].recall /= n;
    m.fm_curve[k].fmeasure /= n;
  }
  return m;
}

}  // namespace minet::metrics
