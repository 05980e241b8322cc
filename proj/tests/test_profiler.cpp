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


#include <gtest/gtest.h>

#include "json.hpp"
#include "minet/profiler.hpp"

namespace minet::profile {
namespace {

std::uint64_t module_macs(const CostReport& r, const std::string& prefix) {
  std::uint64_t total = 0;
  for (const auto& row : r.rows)
    if (row.name.starts_with(prefix)) total += row.macs;
  return total;
}

TEST(CostAlgebra, SpotValues) {
  EXPECT_EQ(cost_dsconv(3, 16, 184, 184), 13542400u);
  EXPECT_EQ(cost_mi(3, 32, 92, 92), 19501056u);
  EXPECT_EQ(cost_mi_dsconv_variant(3, 32, 92, 92), 44419072u);
  EXPECT_EQ(cost_mi_dsconv_variant(3, 32, 92, 92), 4 * cost_dsconv(3, 32, 92, 92));
  EXPECT_THROW(cost_mi(3, 0, 4, 4), std::invalid_argument);
  EXPECT_THROW(cost_dsconv(0, 4, 4, 4), std::invalid_argument);
}

TEST(CostAlgebra, MiIsCheaperThanFourDsconvsForEveryWidth) {
  for (std::uint64_t res : {368, 46, 12})
    for (std::uint64_t c = 2; c <= 128; ++c)
      EXPECT_LT(cost_mi(3, c, res, res), cost_mi_dsconv_variant(3, c, res, res)) << c;
  // c = 1 is the one width where the fused form costs more.
  EXPECT_GT(cost_mi(3, 1, 8, 8), cost_mi_dsconv_variant(3, 1, 8, 8));
}

TEST(CostAlgebra, AgreesWithNetworkLayerPlan) {
  MINetConfig cfg;
  const auto standard = count_macs(Network<float>(cfg, 0), 368, 368);
  EXPECT_EQ(module_macs(standard, "stage2.mi1."), cost_mi(3, 32, 92, 92));
  cfg.variant = MIVariant::SumDSConv;
  const auto sum = count_macs(Network<float>(cfg, 0), 368, 368);
  EXPECT_EQ(module_macs(sum, "stage2.mi1."), cost_mi_dsconv_variant(3, 32, 92, 92));
}

TEST(Params, DefaultNetworkCounts) {
  Network<float> net(MINetConfig{}, 0);
  const auto r = count_params(net);
  EXPECT_EQ(r.trainable_params, net.params().element_count());
  EXPECT_EQ(r.running_params, net.buffers().element_count());
  EXPECT_EQ(r.trainable_params, 261445u);
  EXPECT_EQ(r.running_params, 3552u);
  EXPECT_GE(r.trainable_params, 240000u);
  EXPECT_LE(r.trainable_params, 320000u);
}

TEST(Params, VariantsMatchStorage) {
  for (MIVariant v : all_variants()) {
    MINetConfig cfg;
    cfg.variant = v;
    Network<float> net(cfg, 0);
    EXPECT_EQ(count_params(net).trainable_params, net.params().element_count()) << variant_name(v);
  }
}

TEST(Macs, DefaultBudgetAndRatios) {
  auto macs = [](MIVariant v) {
    MINetConfig cfg;
    cfg.variant = v;
    return count_macs(Network<float>(cfg, 0), 368, 368).macs;
  };
  const auto base = macs(MIVariant::Standard);
  EXPECT_EQ(base, 261080128u);
  const double concat = static_cast<double>(macs(MIVariant::ConcatDSConv)) / base;
  const double sum = static_cast<double>(macs(MIVariant::SumDSConv)) / base;
  EXPECT_GE(concat, 2.5);
  EXPECT_LE(concat, 4.0);
  EXPECT_GE(sum, 1.5);
  EXPECT_LE(sum, 2.5);
  EXPECT_LT(macs(MIVariant::SumFusion), base);
  EXPECT_LT(macs(MIVariant::NoChannelInteraction), base);
}

TEST(Macs, InstrumentedCountsMatchPerLayerForEveryVariant) {
  for (MIVariant v : all_variants()) {
    MINetConfig cfg;
    cfg.variant = v;
    Network<float> net(cfg, 0);
    const auto check = verify_macs(net, 64, 80);
    EXPECT_TRUE(check.match) << variant_name(v);
    EXPECT_TRUE(check.mismatches.empty());
    EXPECT_EQ(check.analytic, count_macs(net, 64, 80).macs);
    const auto per_layer = instrumented_macs(net, 64, 80);
    EXPECT_EQ(per_layer.at("stage1.conv"), 16u * 9 * 32 * 40);
  }
}

TEST(Report, CsvAndJsonExports) {
  Network<float> net(MINetConfig{}, 0);
  const auto r = count_macs(net, 368, 368);
  const auto csv = r.to_csv();
  EXPECT_TRUE(csv.starts_with("name,type,params,macs\n"));
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.rows.size() + 1);
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j["macs"].get<std::uint64_t>(), r.macs);
  EXPECT_EQ(j["trainable_params"].get<std::size_t>(), 261445u);
  EXPECT_GT(r.bn_elements, 0u);
  EXPECT_GT(r.resize_elements, 0u);
}

TEST(Latency, PercentilesAndBench) {
  EXPECT_DOUBLE_EQ(percentile({3, 1, 2, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile({5}, 0.95), 5);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 0.95), 9.5);
  EXPECT_THROW(percentile({}, 0.5), std::invalid_argument);

  MINetConfig cfg;
  cfg.stage_widths = {4, 8, 8, 8, 8};
  cfg.mi_counts = {1, 1, 1, 1};
  Network<float> net(cfg, 0);
  EXPECT_THROW(latency_bench(net, 32, 32, 9), std::invalid_argument);
  const auto stats = latency_bench(net, 32, 32, 10, 1);
  EXPECT_EQ(stats.samples_ms.size(), 10u);
  EXPECT_GT(stats.mean_ms, 0.0);
  EXPECT_LE(stats.p50_ms, stats.p95_ms);
  EXPECT_EQ(stats.macs, count_macs(net, 32, 32).macs);
  const auto j = nlohmann::json::parse(stats.to_json());
  EXPECT_EQ(j["samples_ms"].size(), 10u);
}

}  // namespace
}  // namespace minet::profile
