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
#include <sstream>

#include "json.hpp"
#include "minet/cli.hpp"

namespace minet::cli {

namespace {

using nlohmann::ordered_json;

void check_keys(const ordered_json& user, const ordered_json& defaults, const std::string& path) {
  for (const auto& [key, value] : user.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + where + "'");
    const ordered_json& def = defaults.at(key);
    bool ok = true;
    if (def.is_object()) {
      ok = value.is_object();
      if (ok) check_keys(value, def, where);
    } else if (def.is_array()) {
      ok = value.is_array();
    } else if (def.is_boolean()) {
      ok = value.is_boolean();
    } else if (def.is_number_unsigned()) {
      ok = value.is_number_unsigned();
    } else if (def.is_number_integer()) {
      ok = value.is_number_integer();
    } else if (def.is_number()) {
      ok = value.is_number();
    } else if (def.is_string()) {
      ok = value.is_string();
    }
    if (!ok) {
      throw ConfigError("config key '" + where + "' must be of type " +
                        std::string(def.type_name()) + ", got " + value.type_name());
    }
  }
}

void flatten(const ordered_json& j, const std::string& path, std::vector<std::string>& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (value.is_object()) {
      flatten(value, where, out);
    } else {
      out.push_back(where + " = " + value.dump());
    }
  }
}

ordered_json to_object(const RunConfig& c) {
  ordered_json j;
  j["network"] = ordered_json::parse(c.network.to_json());
  const auto& t = c.train;
  j["train"] = {{"lr", t.lr},
                {"batch", t.batch},
                {"iterations", t.iterations},
                {"seed", t.seed},
                {"checkpoint_every", t.checkpoint_every},
                {"checkpoint_dir", t.checkpoint_dir},
                {"log_every", t.log_every},
                {"virtual_flip", t.virtual_flip}};
  const auto& a = c.data.augment;
  j["data"] = {{"root", c.data.root},
               {"train_split", c.data.train_split},
               {"test_split", c.data.test_split},
               {"index_file", c.data.index_file},
               {"augment",
                {{"resize_to", a.resize_to},
                 {"crop_to", a.crop_to},
                 {"hflip", a.hflip},
                 {"mean", a.mean},
                 {"std", a.std},
                 {"seed", a.seed}}}};
  j["eval"] = {{"pred_dir", c.eval.pred_dir}, {"gt_dir", c.eval.gt_dir}, {"report", c.eval.report}};
  j["profile"] = {{"height", c.profile.height},
                  {"width", c.profile.width},
                  {"csv", c.profile.csv},
                  {"json", c.profile.json},
                  {"instrumented", c.profile.instrumented}};
  j["gradcheck"] = {{"seed", c.gradcheck.seed},
                    {"eps", c.gradcheck.eps},
                    {"tolerance", c.gradcheck.tolerance},
                    {"max_coords", c.gradcheck.max_coords}};
  j["bench"] = {{"height", c.bench.height},
                {"width", c.bench.width},
                {"repeats", c.bench.repeats},
                {"warmup", c.bench.warmup}};
  return j;
}

}  // namespace

void RunConfig::validate() const {
  try {
    network.validate();
    data.augment.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(train.lr > 0, "train.lr must be > 0");
  require(train.batch >= 1, "train.batch must be >= 1");
  require(train.iterations >= 0, "train.iterations must be >= 0");
  require(train.checkpoint_every >= 0, "train.checkpoint_every must be >= 0");
  require(train.log_every >= 1, "train.log_every must be >= 1");
  require(!train.checkpoint_dir.empty(), "train.checkpoint_dir must not be empty");
  require(profile.height >= kMinInputSize && profile.width >= kMinInputSize,
          "profile.height/width must be >= 32");
  require(bench.height >= kMinInputSize && bench.width >= kMinInputSize,
          "bench.height/width must be >= 32");
  require(bench.repeats >= 10, "bench.repeats must be >= 10");
  require(bench.warmup >= 0, "bench.warmup must be >= 0");
  require(gradcheck.eps > 0 && gradcheck.tolerance > 0, "gradcheck.eps/tolerance must be > 0");
  require(gradcheck.max_coords >= 1, "gradcheck.max_coords must be >= 1");
  require(data.augment.crop_to >= kMinInputSize, "data.augment.crop_to must be >= 32");
}

std::string RunConfig::to_json() const { return to_object(*this).dump(2); }

RunConfig RunConfig::from_json(const std::string& text) {
  ordered_json user;
  try {
    user = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  ordered_json merged = to_object(RunConfig{});
  check_keys(user, merged, "");
  merged.merge_patch(user);

  RunConfig c;
  try {
    c.network = MINetConfig::from_json(merged["network"].dump());
    const auto& t = merged["train"];
    c.train.lr = t["lr"].get<double>();
    c.train.batch = t["batch"].get<int>();
    c.train.iterations = t["iterations"].get<int>();
    c.train.seed = t["seed"].get<std::uint64_t>();
    c.train.checkpoint_every = t["checkpoint_every"].get<int>();
    c.train.checkpoint_dir = t["checkpoint_dir"].get<std::string>();
    c.train.log_every = t["log_every"].get<int>();
    c.train.virtual_flip = t["virtual_flip"].get<bool>();
    const auto& d = merged["data"];
    c.data.root = d["root"].get<std::string>();
    c.data.train_split = d["train_split"].get<std::string>();
    c.data.test_split = d["test_split"].get<std::string>();
    c.data.index_file = d["index_file"].get<std::string>();
    const auto& a = d["augment"];
    c.data.augment.resize_to = a["resize_to"].get<int>();
    c.data.augment.crop_to = a["crop_to"].get<int>();
    c.data.augment.hflip = a["hflip"].get<bool>();
    c.data.augment.mean = a["mean"].get<double>();
    c.data.augment.std = a["std"].get<double>();
    c.data.augment.seed = a["seed"].get<std::uint64_t>();
    const auto& e = merged["eval"];
    c.eval.pred_dir = e["pred_dir"].get<std::string>();
    c.eval.gt_dir = e["gt_dir"].get<std::string>();
    c.eval.report = e["report"].get<std::string>();
    const auto& p = merged["profile"];
    c.profile.height = p["height"].get<int>();
    c.profile.width = p["width"].get<int>();
    c.profile.csv = p["csv"].get<std::string>();
    c.profile.json = p["json"].get<std::string>();
    c.profile.instrumented = p["instrumented"].get<bool>();
    const auto& g = merged["gradcheck"];
    c.gradcheck.seed = g["seed"].get<std::uint64_t>();
    c.gradcheck.eps = g["eps"].get<double>();
    c.gradcheck.tolerance = g["tolerance"].get<double>();
    c.gradcheck.max_coords = g["max_coords"].get<std::size_t>();
    const auto& b = merged["bench"];
    c.bench.height = b["height"].get<int>();
    c.bench.width = b["width"].get<int>();
    c.bench.repeats = b["repeats"].get<int>();
    c.bench.warmup = b["warmup"].get<int>();
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid network section: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return RunConfig::from_json(ss.str());
}

std::vector<std::string> config_key_listing() {
  std::vector<std::string> out;
  flatten(to_object(RunConfig{}), "", out);
  return out;
}

}  // namespace minet::cli
