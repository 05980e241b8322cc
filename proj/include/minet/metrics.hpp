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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "minet/tensor.hpp"

/// Saliency evaluation criteria. Maps are single-plane (1,1,h,w) tensors:
/// predictions in [0,1], ground truth binarized at 0.5.
namespace minet::metrics {

using Map = Tensor4<double>;

inline constexpr int kCurvePoints = 256;
inline constexpr double kCurveBeta2 = 0.3;
inline constexpr double kWfBeta2 = 1.0;
inline constexpr double kWfSigma = 5.0;
inline constexpr int kWfWindow = 7;
inline constexpr double kPfomAlpha = 1.0 / 9.0;
inline constexpr double kEps = 2.220446049250313e-16;

struct PRPoint {
  double threshold = 0;
  double precision = 0;
  double recall = 0;
};

struct FPoint {
  double threshold = 0;
  double fmeasure = 0;
};

struct ThresholdMetrics {
  double iou = 0;
  double or_score = 0;
  std::vector<PRPoint> pr_curve;
  std::vector<FPoint> fm_curve;
};

struct MetricsReport {
  double mae = 0;
  double wf = 0;
  double or_score = 0;
  double sm = 0;
  double pfom = 0;
  double iou = 0;
  std::vector<PRPoint> pr_curve;
  std::vector<FPoint> fm_curve;

  double max_f() const;
  double mean_f() const;
};

double mae(const Map& s, const Map& g);

/// IoU at 0.5, OR at min(2 mean(s), 1), PR and F-measure curves at k/255.
ThresholdMetrics threshold_metrics(const Map& s, const Map& g);

/// (precision, recall, F) for binary prediction b and mask g.
struct SetScores {
  double precision = 0;
  double recall = 0;
  double fmeasure = 0;
  double iou = 0;
};
SetScores set_scores(std::uint64_t tp, std::uint64_t predicted, std::uint64_t positives,
                     std::uint64_t union_count);

double s_measure(const Map& s, const Map& g);
double weighted_f(const Map& s, const Map& g);
double pfom(const Map& s, const Map& g);

MetricsReport evaluate_pair(const Map& s, const Map& g);

/// Arithmetic mean of the scalars, pointwise mean of the curves.
MetricsReport mean_report(std::span<const MetricsReport> reports);

// --- distance helpers ------------------------------------------------------

/// Squared Euclidean distance from every pixel to the nearest set pixel of
/// fg (row-major h x w); +inf everywhere when fg is empty.
std::vector<double> squared_edt(std::span<const std::uint8_t> fg, int h, int w);

/// Pixels of mask with at least one 4-neighbour outside the mask; pixels
/// beyond the image border count as outside.
std::vector<std::uint8_t> boundary4(std::span<const std::uint8_t> mask, int h, int w);

/// Binarizes a map at t (value >= t).
std::vector<std::uint8_t> binarize(const Map& m, double t);

// --- datasets --------------------------------------------------------------

struct DatasetEvaluation {
  MetricsReport report;
  std::vector<std::string> matched;
  std::vector<std::string> skipped;  // unmatched or size-mismatched names
};

/// Pairs files by stem (PNG or PGM), reads predictions as v/255 and ground
/// truth binarized at 128, and averages the per-pair reports.
DatasetEvaluation evaluate_dataset(const std::filesystem::path& pred_dir,
                                   const std::filesystem::path& gt_dir);

/// Writes the JSON report to report_path and pr_curve.csv / fm_curve.csv
/// next to it.
void write_report(const DatasetEvaluation& eval, const std::filesystem::path& report_path);

std::string report_json(const DatasetEvaluation& eval);

}  // namespace minet::metrics
