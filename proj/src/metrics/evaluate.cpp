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


#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"
#include "minet/data.hpp"
#include "minet/metrics.hpp"
#include "minet/parallel.hpp"

namespace minet::metrics {

namespace fs = std::filesystem;

namespace {

std::map<std::string, fs::path> images_by_stem(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw data::DataError("not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && data::is_image_file(e.path())) {
      out.emplace(e.path().stem().string(), e.path());
    }
  }
  return out;
}

Map to_map(const data::GrayImage& img, bool binary) {
  Map m(Shape4{1, 1, img.height, img.width});
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    m.data()[i] = binary ? (img.pixels[i] >= data::kMaskThreshold ? 1.0 : 0.0)
                         : img.pixels[i] / 255.0;
  }
  return m;
}

}  // namespace

DatasetEvaluation evaluate_dataset(const std::filesystem::path& pred_dir,
                                   const std::filesystem::path& gt_dir) {
  const auto preds = images_by_stem(pred_dir);
  const auto gts = images_by_stem(gt_dir);
  DatasetEvaluation ev;
  std::vector<std::pair<fs::path, fs::path>> pairs;
  for (const auto& [name, path] : preds) {
    auto it = gts.find(name);
    if (it == gts.end()) {
      ev.skipped.push_back(name + " (no ground truth)");
    } else {
      ev.matched.push_back(name);
      pairs.emplace_back(path, it->second);
    }
  }
  for (const auto& [name, path] : gts) {
    if (!preds.count(name)) ev.skipped.push_back(name + " (no prediction)");
  }

  std::vector<MetricsReport> reports(pairs.size());
  std::vector<char> ok(pairs.size(), 1);
  std::vector<std::string> errors(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      try {
        const auto s = data::read_image(pairs[i].first);
        const auto g = data::read_image(pairs[i].second);
        if (s.height != g.height || s.width != g.width) {
          ok[i] = 0;
          continue;
        }
        reports[i] = evaluate_pair(to_map(s, false), to_map(g, true));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw data::DataError(e);
  }
  std::vector<MetricsReport> kept;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (ok[i]) {
      kept.push_back(std::move(reports[i]));
      names.push_back(ev.matched[i]);
    } else {
      ev.skipped.push_back(ev.matched[i] + " (size mismatch)");
    }
  }
  ev.matched = std::move(names);
  if (kept.empty()) {
    throw data::DataError("no matching prediction/ground-truth pairs between " +
                          pred_dir.string() + " and " + gt_dir.string());
  }
  ev.report = mean_report(kept);
  return ev;
}

std::string report_json(const DatasetEvaluation& eval) {
  const MetricsReport& r = eval.report;
  nlohmann::ordered_json j;
  j["pairs"] = eval.matched.size();
  j["mae"] = r.mae;
  j["wf"] = r.wf;
  j["or"] = r.or_score;
  j["sm"] = r.sm;
  j["pfom"] = r.pfom;
  j["iou"] = r.iou;
  j["max_f"] = r.max_f();
  j["mean_f"] = r.mean_f();
  j["skipped"] = eval.skipped;
  return j.dump(2);
}

void write_report(const DatasetEvaluation& eval, const std::filesystem::path& report_path) {
  auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw data::DataError("cannot write " + p.string());
    out << std::setprecision(17);
    return out;
  };
  if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
  const fs::path dir = report_path.parent_path();
  {
    auto out = open(report_path);
    out << report_json(eval) << '\n';
  }
  {
    auto out = open(dir / "pr_curve.csv");
    out << "threshold,precision,recall\n";
    for (const auto& p : eval.report.pr_curve) {
      out << p.threshold << ',' << p.precision << ',' << p.recall << '\n';
    }
  }
  {
    auto out = open(dir / "fm_curve.csv");
    out << "threshold,fmeasure\n";
    for (const auto& p : eval.report.fm_curve) out << p.threshold << ',' << p.fmeasure << '\n';
  }
}

}  // namespace minet::metrics
