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
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "minet/data.hpp"
#include "minet/gradcheck_suite.hpp"
#include "minet/model.hpp"

namespace minet::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitWarning = 1;  // finished, but with skipped inputs or failed checks
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNonFinite = 4;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainSection {
  double lr = 4e-3;
  int batch = 8;
  int iterations = 2000;
  std::uint64_t seed = 0;
  int checkpoint_every = 500;  // 0 disables periodic checkpoints
  std::string checkpoint_dir = "checkpoints";
  int log_every = 1;
  bool virtual_flip = true;
};

struct DataSection {
  std::string root = "data";
  std::string train_split = "train";
  std::string test_split = "test";
  std::string index_file;
  data::AugmentConfig augment;
};

struct EvalSection {
  std::string pred_dir;
  std::string gt_dir;
  std::string report = "report.json";
};

struct ProfileSection {
  int height = 368;
  int width = 368;
  std::string csv = "profile.csv";
  std::string json = "profile.json";
  bool instrumented = true;
};

struct BenchSection {
  int height = 368;
  int width = 368;
  int repeats = 10;
  int warmup = 2;
};

struct RunConfig {
  MINetConfig network;
  TrainSection train;
  DataSection data;
  EvalSection eval;
  ProfileSection profile;
  GradSuiteOptions gradcheck;
  BenchSection bench;

  void validate() const;
  std::string to_json() const;
  /// Missing keys keep their defaults; unknown keys and wrong types throw
  /// ConfigError.
  static RunConfig from_json(const std::string& text);
};

RunConfig load_run_config(const fs::path& path);

/// "section.key = default" for every configuration key.
std::vector<std::string> config_key_listing();

// --- commands --------------------------------------------------------------
// Each returns an exit code and writes line-delimited JSON to log.

struct TrainResult {
  Network<float> net;
  std::vector<double> losses;
  fs::path final_checkpoint;
};

/// The training loop; throws on invalid data and NonFiniteLoss on NaN/inf.
TrainResult train(const RunConfig& cfg, std::ostream& log);

class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean absolute error of S1 against the masks at the test-time resolution.
double dataset_mae(Network<float>& net, const std::vector<data::Sample>& samples,
                   const data::AugmentConfig& cfg);

/// S1 for one image at its own resolution, as 8-bit values.
data::GrayImage predict_image(Network<float>& net, const data::GrayImage& image,
                              double mean = data::kMean, double std = data::kStd);

int cmd_train(const RunConfig& cfg, std::ostream& log);
int cmd_predict(const fs::path& checkpoint, const fs::path& input_dir, const fs::path& output_dir,
                std::ostream& log);
int cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& report_path,
             std::ostream& log);
int cmd_profile(const RunConfig& cfg, std::ostream& log);
int cmd_gradcheck(const RunConfig& cfg, std::ostream& log);
/// Without a checkpoint the bench runs a freshly initialised network.
int cmd_bench(const std::optional<fs::path>& checkpoint, const RunConfig& cfg, std::ostream& log);

}  // namespace minet::cli
