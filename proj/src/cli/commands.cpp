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
#include <cmath>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "minet/autodiff/optim.hpp"
#include "minet/cli.hpp"
#include "minet/loss.hpp"
#include "minet/metrics.hpp"
#include "minet/profiler.hpp"

namespace minet::cli {

namespace {

using nlohmann::ordered_json;

void emit(std::ostream& log, const ordered_json& j) { log << j.dump() << '\n' << std::flush; }

void emit_error(std::ostream& log, const std::string& kind, const std::string& msg) {
  emit(log, {{"event", "error"}, {"kind", kind}, {"message", msg}});
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw data::DataError("cannot create directory " + dir.string() + ": " + ec.message());
  }
}

// Runs body and maps failures to the documented exit codes.
template <typename F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    emit_error(log, "config", e.what());
    return kExitConfig;
  } catch (const NonFiniteLoss& e) {
    emit_error(log, "non_finite_loss", e.what());
    return kExitNonFinite;
  } catch (const data::DataError& e) {
    emit_error(log, "data", e.what());
    return kExitData;
  } catch (const CheckpointError& e) {
    emit_error(log, "checkpoint", e.what());
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    emit_error(log, "io", e.what());
    return kExitData;
  }
}

std::string checkpoint_name(int iteration) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "iter_%06d.mnet", iteration);
  return buf;
}

}  // namespace

TrainResult train(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto entries = data::scan_split(cfg.data.root, cfg.data.train_split,
                                        cfg.data.index_file.empty() ? fs::path{}
                                                                    : fs::path(cfg.data.index_file));
  std::vector<data::Sample> samples;
  samples.reserve(entries.size());
  for (const auto& e : entries) {
    samples.push_back(data::load_sample(e.image, e.mask, cfg.data.augment.mean,
                                        cfg.data.augment.std));
    samples.back().id = e.id;
    samples.back().defect_class = e.defect_class;
  }
  const fs::path ckpt_dir = cfg.train.checkpoint_dir;
  ensure_dir(ckpt_dir);

  TrainResult result{Network<float>(cfg.network, cfg.train.seed), {}, {}};
  Network<float>& net = result.net;
  ad::AdamState<float> adam;
  adam.lr = cfg.train.lr;
  data::BatchStream stream(samples, cfg.train.batch, cfg.data.augment,
                           cfg.train.seed ^ cfg.data.augment.seed, cfg.train.virtual_flip);
  Rng dropout_rng(cfg.train.seed + 1);
  emit(log, {{"event", "start"},
             {"samples", samples.size()},
             {"batches_per_epoch", stream.batches_per_epoch()},
             {"iterations", cfg.train.iterations},
             {"params", net.params().element_count()}});

  for (int it = 1; it <= cfg.train.iterations; ++it) {
    const data::Batch batch = stream.next();
    ad::Tape<float> tape;
    const auto heads = net.forward(tape, tape.constant(batch.images), Mode::Train, &dropout_rng);
    LossReport report;
    const auto loss = ad::hybrid_loss<float>(tape, heads, batch.masks, &report);
    if (!std::isfinite(report.total)) {
      throw NonFiniteLoss("non-finite loss at iteration " + std::to_string(it));
    }
    net.params().zero_grad();
    tape.backward(loss);
    ad::adam_step(net.params(), adam);
    result.losses.push_back(report.total);
    if (it % cfg.train.log_every == 0 || it == cfg.train.iterations) {
      emit(log, {{"event", "iter"},
                 {"iter", it},
                 {"epoch", stream.epoch()},
                 {"loss", report.total},
                 {"bce_s1", report.per_head[0].first},
                 {"ssim_s1", report.per_head[0].second}});
    }
    if (cfg.train.checkpoint_every > 0 && it % cfg.train.checkpoint_every == 0 &&
        it != cfg.train.iterations) {
      save_checkpoint(net, (ckpt_dir / checkpoint_name(it)).string());
    }
  }
  result.final_checkpoint = ckpt_dir / "final.mnet";
  save_checkpoint(net, result.final_checkpoint.string());
  emit(log, {{"event", "done"}, {"checkpoint", result.final_checkpoint.string()}});
  return result;
}

double dataset_mae(Network<float>& net, const std::vector<data::Sample>& samples,
                   const data::AugmentConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("dataset_mae: no samples");
  double acc = 0;
  for (const auto& s : samples) {
    const data::Sample t = data::test_transform(s, cfg);
    const auto maps = net.predict(t.image);
    double err = 0;
    for (std::size_t i = 0; i < t.mask.size(); ++i) {
      err += std::abs(static_cast<double>(maps[0].data()[i]) - t.mask.data()[i]);
    }
    acc += err / static_cast<double>(t.mask.size());
  }
  return acc / static_cast<double>(samples.size());
}

data::GrayImage predict_image(Network<float>& net, const data::GrayImage& image, double mean,
                              double std) {
  const int size = net.config().input_size;
  Tensor4<float> x = data::image_tensor(image, mean, std);
  if (x.h() != size || x.w() != size) x = resize_bilinear(x, size, size);
  Tensor4<float> s1 = net.predict(x)[0];
  if (s1.h() != image.height || s1.w() != image.width) {
    s1 = resize_bilinear(s1, image.height, image.width);
  }
  data::GrayImage out{image.height, image.width, std::vector<std::uint8_t>(s1.size())};
  for (std::size_t i = 0; i < s1.size(); ++i) {
    const double v = std::clamp(static_cast<double>(s1.data()[i]), 0.0, 1.0) * 255.0;
    out.pixels[i] = static_cast<std::uint8_t>(std::lround(v));
  }
  return out;
}

int cmd_train(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    train(cfg, log);
    return kExitOk;
  });
}

int cmd_predict(const fs::path& checkpoint, const fs::path& input_dir, const fs::path& output_dir,
                std::ostream& log) {
  return guarded(log, [&] {
    Network<float> net = load_checkpoint<float>(checkpoint.string());
    if (!fs::is_directory(input_dir)) throw data::DataError("not a directory: " + input_dir.string());
    std::vector<fs::path> inputs;
    for (const auto& e : fs::directory_iterator(input_dir)) {
      if (e.is_regular_file() && data::is_image_file(e.path())) inputs.push_back(e.path());
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) throw data::DataError("no PNG/PGM images in " + input_dir.string());
    ensure_dir(output_dir);
    for (const auto& in : inputs) {
      const auto out = predict_image(net, data::read_image(in));
      const fs::path dst = output_dir / (in.stem().string() + ".png");
      data::write_png(dst, out);
      emit(log, {{"event", "predict"}, {"input", in.string()}, {"output", dst.string()}});
    }
    emit(log, {{"event", "done"}, {"count", inputs.size()}});
    return kExitOk;
  });
}

int cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& report_path,
             std::ostream& log) {
  return guarded(log, [&] {
    const auto ev = metrics::evaluate_dataset(pred_dir, gt_dir);
    metrics::write_report(ev, report_path);
    for (const auto& s : ev.skipped) emit(log, {{"event", "warning"}, {"skipped", s}});
    emit(log, ordered_json::parse(metrics::report_json(ev)));
    return ev.skipped.empty() ? kExitOk : kExitWarning;
  });
}

int cmd_profile(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    Network<float> net(cfg.network, cfg.train.seed);
    const auto report = profile::count_macs(net, cfg.profile.height, cfg.profile.width);
    ordered_json summary = ordered_json::parse(report.to_json());
    summary["enumerated_params"] = net.params().element_count();
    summary["enumerated_running"] = net.buffers().element_count();
    bool ok = net.params().element_count() == report.trainable_params;
    if (cfg.profile.instrumented) {
      const auto check = profile::verify_macs(net, cfg.profile.height, cfg.profile.width);
      summary["instrumented_macs"] = check.instrumented;
      summary["instrumented_match"] = check.match;
      ok = ok && check.match;
    }
    for (const fs::path& p : {fs::path(cfg.profile.csv), fs::path(cfg.profile.json)}) {
      if (p.has_parent_path()) ensure_dir(p.parent_path());
    }
    std::ofstream csv(cfg.profile.csv, std::ios::trunc);
    std::ofstream json(cfg.profile.json, std::ios::trunc);
    if (!csv || !json) throw data::DataError("cannot write profile outputs");
    csv << report.to_csv();
    json << summary.dump(2) << '\n';
    emit(log, summary);
    return ok ? kExitOk : kExitWarning;
  });
}

int cmd_gradcheck(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    bool all = true;
    for (const auto& r : gradcheck_suite(cfg.gradcheck)) {
      all = all && r.report.passed;
      emit(log, {{"event", "gradcheck"},
                 {"family", r.family},
                 {"checked", r.report.checked},
                 {"max_rel_error", r.report.max_rel_error},
                 {"tolerance", r.report.tolerance},
                 {"passed", r.report.passed}});
    }
    emit(log, {{"event", "done"}, {"passed", all}});
    return all ? kExitOk : kExitWarning;
  });
}

int cmd_bench(const std::optional<fs::path>& checkpoint, const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    Network<float> net = checkpoint ? load_checkpoint<float>(checkpoint->string())
                                    : Network<float>(cfg.network, cfg.train.seed);
    const auto stats = profile::latency_bench(net, cfg.bench.height, cfg.bench.width,
                                              cfg.bench.repeats, cfg.bench.warmup);
    emit(log, ordered_json::parse(stats.to_json()));
    return kExitOk;
  });
}

}  // namespace minet::cli
