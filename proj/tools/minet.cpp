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


#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "minet/cli.hpp"

namespace {

std::string config_footer() {
  std::string text = "Config keys (JSON, all optional) and defaults:\n";
  for (const auto& line : minet::cli::config_key_listing()) text += "  " + line + "\n";
  text += "\nExit codes: 0 ok, 1 completed with warnings, 2 config error, 3 data/io error,\n"
          "4 non-finite loss. MINET_THREADS caps kernel threads.\n";
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace minet::cli;
  CLI::App app{"MINet strip-steel defect saliency runtime"};
  app.footer(config_footer());
  app.require_subcommand(1);

  std::string config_path;
  auto load = [&]() -> RunConfig {
    return config_path.empty() ? RunConfig{} : load_run_config(config_path);
  };

  auto* train = app.add_subcommand("train", "Train a network");
  train->add_option("-c,--config", config_path, "JSON run configuration")->required();

  std::string checkpoint, input_dir, output_dir;
  auto* predict = app.add_subcommand("predict", "Write S1 saliency maps as 8-bit PNG");
  predict->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  predict->add_option("--input", input_dir, "Directory of PNG/PGM images")->required();
  predict->add_option("--output", output_dir, "Output directory")->required();

  std::string pred_dir, gt_dir, report = "report.json";
  auto* eval = app.add_subcommand("eval", "Evaluate predictions against ground truth");
  eval->add_option("--pred", pred_dir, "Prediction directory")->required();
  eval->add_option("--gt", gt_dir, "Ground-truth directory")->required();
  eval->add_option("--report", report, "JSON report path (curves are written next to it)");

  auto* profile = app.add_subcommand("profile", "Parameter and MAC accounting");
  profile->add_option("-c,--config", config_path, "JSON run configuration");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gradcheck->add_option("-c,--config", config_path, "JSON run configuration");

  std::string bench_checkpoint;
  auto* bench = app.add_subcommand("bench", "Single-image inference latency");
  bench->add_option("-c,--config", config_path, "JSON run configuration");
  bench->add_option("--checkpoint", bench_checkpoint, "Checkpoint (default: fresh network)");

  CLI11_PARSE(app, argc, argv);

  std::ostream& log = std::cout;
  RunConfig cfg;
  if (!predict->parsed() && !eval->parsed()) {
    try {
      cfg = load();
    } catch (const ConfigError& e) {
      std::cerr << e.what() << '\n';
      return kExitConfig;
    }
  }
  if (train->parsed()) return cmd_train(cfg, log);
  if (predict->parsed()) return cmd_predict(checkpoint, input_dir, output_dir, log);
  if (eval->parsed()) return cmd_eval(pred_dir, gt_dir, report, log);
  if (profile->parsed()) return cmd_profile(cfg, log);
  if (gradcheck->parsed()) return cmd_gradcheck(cfg, log);
  std::optional<std::filesystem::path> ckpt;
  if (!bench_checkpoint.empty()) ckpt = bench_checkpoint;
  return cmd_bench(ckpt, cfg, log);
}
