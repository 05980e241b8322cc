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

#include <cmath>

#include "minet/model.hpp"
#include "reference_net.hpp"

namespace minet {
namespace {

Tensor4<double> random_tensor(Shape4 s, std::uint64_t seed) {
  Rng rng(seed);
  Tensor4<double> t(s);
  for (auto& v : t.values()) v = rng.uniform(-1, 1);
  return t;
}

MINetConfig small_config(MIVariant v = MIVariant::Standard) {
  MINetConfig cfg;
  cfg.stage_widths = {4, 8, 8, 12, 16};
  cfg.mi_counts = {1, 1, 2, 1};
  cfg.variant = v;
  cfg.input_size = 32;
  cfg.train_size = 32;
  return cfg;
}

void randomize_bn(Network<double>& net, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < net.buffers().size(); ++i) {
    auto& b = net.buffers().at(i);
    const bool var = b.name.ends_with(".running_var");
    for (auto& v : b.value.values()) v = var ? rng.uniform(0.5, 1.5) : rng.uniform(-0.3, 0.3);
  }
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    auto& p = net.params().at(i);
    if (p.name.ends_with(".gamma") || p.name.ends_with(".beta") || p.name.ends_with(".bias"))
      for (auto& v : p.value.values()) v += rng.uniform(-0.2, 0.2);
  }
}

TEST(Regroup, InterleavesChannelIndices) {
  std::array<Tensor4<double>, 4> four;
  for (int i = 0; i < 4; ++i) four[i] = random_tensor({2, 3, 2, 2}, i + 1);
  const auto r = regroup_channels<double>(four);
  ASSERT_EQ(r.shape(), (Shape4{2, 12, 2, 2}));
  for (int b = 0; b < 2; ++b)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 4; ++i)
        for (int p = 0; p < 4; ++p) EXPECT_EQ(r(b, 4 * j + i, p / 2, p % 2), four[i](b, j, p / 2, p % 2));
  const auto back = ungroup_channels(r);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(back[i].vec(), four[i].vec());
  const auto src = regroup_source_channels(3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 4; ++i) EXPECT_EQ(src[4 * j + i], i * 3 + j);
}

TEST(Variants, NamesRoundTripAndLabelsParse) {
  for (MIVariant v : all_variants()) EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_EQ(parse_variant("w/o Multi"), MIVariant::UniformDilation);
  EXPECT_EQ(parse_variant("S-PW"), MIVariant::SumFusion);
  EXPECT_EQ(parse_variant("w/o CI"), MIVariant::NoChannelInteraction);
  EXPECT_EQ(parse_variant("Concat"), MIVariant::ConcatDSConv);
  EXPECT_EQ(parse_variant("Sum"), MIVariant::SumDSConv);
  EXPECT_THROW(parse_variant("bogus"), std::invalid_argument);
}

TEST(MIModule, StandardParamCountAtThirtyTwoChannels) {
  EXPECT_EQ(MIModule::param_count(32, MIVariant::Standard), 2304u);
}

TEST(MIModule, ClosedFormMatchesLayerList) {
  for (MIVariant v : all_variants()) {
    for (int c : {1, 5, 32, 96}) {
      MIModule m("m", c, v);
      std::size_t sum = 0;
      for (const auto& [name, spec] : m.convs()) {
        spec.validate();
        EXPECT_FALSE(spec.bias);
        sum += spec.param_count();
      }
      EXPECT_EQ(sum, MIModule::param_count(c, v)) << variant_name(v) << " c=" << c;
    }
  }
}

TEST(MIModule, StandardUsesDilationsAndGroupedFusion) {
  MIModule m("x", 8, MIVariant::Standard);
  const auto convs = m.convs();
  ASSERT_EQ(convs.size(), 6u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_TRUE(convs[i].second.is_depthwise());
    EXPECT_EQ(convs[i].second.dilation, 1 << i);
    EXPECT_EQ(convs[i].second.padding, 1 << i);
  }
  EXPECT_EQ(convs[4].second.groups, 8);
  EXPECT_EQ(convs[4].second.c_in, 32);
  EXPECT_EQ(convs[5].second.groups, 1);
  for (const auto& [n, s] : MIModule("u", 8, MIVariant::UniformDilation).convs())
    EXPECT_EQ(s.dilation, 1) << n;
}

TEST(MIModule, PreservesShapeAndRejectsWrongWidth) {
  ad::ParamStore<double> store;
  Rng rng(1);
  for (MIVariant v : all_variants()) {
    MIModule m(std::string(variant_name(v)), 4, v);
    m.register_params(store, rng);
    ad::Tape<double> tape(false);
    const auto y = m.forward(tape, tape.constant(random_tensor({2, 4, 9, 9}, 2)), store);
    EXPECT_EQ(y->value.shape(), (Shape4{2, 4, 9, 9}));
    for (double v2 : y->value.values()) EXPECT_GE(v2, 0.0);
    EXPECT_THROW(m.forward(tape, tape.constant(random_tensor({1, 3, 9, 9}, 3)), store), ShapeError);
  }
}

TEST(Config, JsonRoundTripAndValidation) {
  MINetConfig c = small_config(MIVariant::SumFusion);
  EXPECT_EQ(MINetConfig::from_json(c.to_json()), c);
  EXPECT_THROW(MINetConfig::from_json(R"({"widths": [1]})"), std::invalid_argument);
  EXPECT_THROW(MINetConfig::from_json(R"({"input_size": 16})"), std::invalid_argument);
  EXPECT_THROW(MINetConfig::from_json("[1,2]"), std::invalid_argument);
  EXPECT_THROW(MINetConfig::from_json(R"({"variant": 3})"), std::invalid_argument);
  EXPECT_EQ(MINetConfig{}.decoder_widths(), (std::array<int, 5>{16, 16, 32, 64, 96}));
}

TEST(Network, DefaultParameterLayout) {
  Network<float> net(MINetConfig{}, 0);
  EXPECT_EQ(net.params().at(0).name, "stage1.conv.weight");
  EXPECT_EQ(net.params().at(net.params().size() - 1).name, "head5.conv.bias");
  EXPECT_EQ(net.mi_modules().size(), 16u);
  EXPECT_EQ(net.params().get("stage1.conv.weight").value.shape(), (Shape4{16, 1, 3, 3}));
  EXPECT_EQ(net.params().get("stage4.mi6.fuse.weight").value.shape(), (Shape4{96, 4, 1, 1}));
  EXPECT_EQ(net.params().get("head1.conv.weight").value.shape(), (Shape4{1, 16, 1, 1}));
  EXPECT_EQ(net.buffers().get("decoder5.ds2.pw_bn.running_var").value.shape(),
            (Shape4{96, 1, 1, 1}));
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    const auto& n = net.params().at(i).name;
    if (n.ends_with(".bias")) {
      EXPECT_TRUE(n.starts_with("head")) << n;
    }
  }
}

TEST(Network, SeedDeterminesWeights) {
  Network<float> a(small_config(), 5), b(small_config(), 5), c(small_config(), 6);
  EXPECT_EQ(a.params().at(3).value.vec(), b.params().at(3).value.vec());
  EXPECT_NE(a.params().at(3).value.vec(), c.params().at(3).value.vec());
}

TEST(Network, OutputShapesOnNonSquareInput) {
  Network<double> net(small_config(), 1);
  ad::Tape<double> tape(false);
  const auto x = tape.constant(random_tensor({2, 1, 40, 64}, 3));
  const auto f = net.backbone(tape, x, Mode::Infer);
  const int h[5] = {20, 10, 5, 3, 2}, w[5] = {32, 16, 8, 4, 2};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(f[i]->value.h(), h[i]);
    EXPECT_EQ(f[i]->value.w(), w[i]);
    EXPECT_EQ(f[i]->value.c(), net.config().stage_widths[i]);
  }
  const auto s = net.forward(tape, x, Mode::Infer);
  for (const auto& m : s) {
    EXPECT_EQ(m->value.shape(), (Shape4{2, 1, 40, 64}));
    for (double v : m->value.values()) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Network, RejectsBadInputs) {
  Network<double> net(small_config(), 1);
  EXPECT_THROW(net.predict(random_tensor({1, 1, 31, 40}, 1)), ShapeError);
  EXPECT_THROW(net.predict(random_tensor({1, 3, 40, 40}, 1)), ShapeError);
  ad::Tape<double> tape;
  EXPECT_THROW(net.forward(tape, tape.constant(random_tensor({1, 1, 32, 32}, 1)), Mode::Train),
               std::invalid_argument);
}

TEST(Network, TrainModeUpdatesRunningStatsInferDoesNot) {
  Network<double> net(small_config(), 1);
  const auto before = net.buffers().get("stage1.bn.running_mean").value.vec();
  net.predict(random_tensor({1, 1, 32, 32}, 2));
  EXPECT_EQ(net.buffers().get("stage1.bn.running_mean").value.vec(), before);
  ad::Tape<double> tape;
  Rng rng(3);
  net.forward(tape, tape.constant(random_tensor({2, 1, 32, 32}, 4)), Mode::Train, &rng);
  EXPECT_NE(net.buffers().get("stage1.bn.running_mean").value.vec(), before);
}

TEST(Network, DescribeMatchesStoredParameters) {
  for (MIVariant v : all_variants()) {
    Network<float> net(small_config(v), 0);
    std::size_t described = 0;
    for (const auto& row : net.describe(32, 32)) described += row.params;
    EXPECT_EQ(described, net.params().element_count()) << variant_name(v);
  }
}

class ReferenceEquivalence : public ::testing::TestWithParam<MIVariant> {};

TEST_P(ReferenceEquivalence, MatchesLoopOnlyForward) {
  Network<double> net(small_config(GetParam()), 21);
  randomize_bn(net, 22);
  const auto x = random_tensor({1, 1, 36, 44}, 23);
  const auto lib = net.predict(x);
  const auto ref = testing::reference_forward(net, testing::to_ref(x));
  for (int k = 0; k < 5; ++k) {
    ASSERT_EQ(ref[k].v.size(), lib[k].size());
    for (std::size_t i = 0; i < lib[k].size(); ++i) ASSERT_NEAR(lib[k][i], ref[k].v[i], 1e-11);
  }
}

INSTANTIATE_TEST_SUITE_P(AllVariants, ReferenceEquivalence, ::testing::ValuesIn(all_variants()),
                         [](const auto& info) { return std::string(variant_name(info.param)); });

TEST(Checkpoint, RoundTripPreservesEverything) {
  Network<float> net(small_config(MIVariant::ConcatDSConv), 7);
  Rng rng(1);
  for (std::size_t i = 0; i < net.buffers().size(); ++i)
    for (auto& v : net.buffers().at(i).value.values()) v = static_cast<float>(rng.uniform(0.5, 1));
  const auto bytes = serialize_checkpoint(net);
  ASSERT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "MNET");
  auto copy = deserialize_checkpoint<float>(bytes, net.config());
  EXPECT_EQ(copy.config(), net.config());
  EXPECT_EQ(serialize_checkpoint(copy), bytes);
  Tensor4<float> x(Shape4{1, 1, 32, 32});
  for (auto& v : x.values()) v = static_cast<float>(rng.normal());
  EXPECT_EQ(copy.predict(x)[0].vec(), net.predict(x)[0].vec());
}

TEST(Checkpoint, RejectsCorruptInput) {
  Network<float> net(small_config(), 7);
  const auto good = serialize_checkpoint(net);
  auto kind_of = [](std::vector<std::uint8_t> bytes, std::optional<MINetConfig> expect = {}) {
    try {
      deserialize_checkpoint<float>(bytes, expect);
    } catch (const CheckpointError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  using K = CheckpointError::Kind;
  auto bad = good;
  bad[0] = 'X';
  EXPECT_EQ(kind_of(bad), static_cast<int>(K::BadMagic));
  bad = good;
  bad[4] = 9;
  EXPECT_EQ(kind_of(bad), static_cast<int>(K::Version));
  bad.assign(good.begin(), good.end() - 10);
  EXPECT_EQ(kind_of(bad), static_cast<int>(K::Truncated));
  bad.assign(good.begin(), good.begin() + 30);
  EXPECT_EQ(kind_of(bad), static_cast<int>(K::Truncated));
  MINetConfig other = small_config();
  other.variant = MIVariant::SumFusion;
  EXPECT_EQ(kind_of(good, other), static_cast<int>(K::Config));
  EXPECT_EQ(kind_of(good, small_config()), -1);
  // Shape tampering: first tensor dim 0 sits after magic, version, count,
  // name length, name and rank.
  bad = good;
  const std::size_t dim0 = 4 + 4 + 4 + 2 + std::string("stage1.conv.weight").size() + 1;
  bad[dim0] = static_cast<std::uint8_t>(bad[dim0] + 1);
  EXPECT_NE(kind_of(bad), -1);
  EXPECT_THROW(load_checkpoint<float>("/nonexistent/ckpt.mnet"), CheckpointError);
}

TEST(Checkpoint, SaveAndLoadFile) {
  Network<float> net(small_config(), 3);
  const std::string path = ::testing::TempDir() + "/minet_model_test.mnet";
  save_checkpoint(net, path);
  auto loaded = load_checkpoint<float>(path);
  EXPECT_EQ(serialize_checkpoint(loaded), serialize_checkpoint(net));
  auto as_double = load_checkpoint<double>(path);
  EXPECT_EQ(as_double.params().at(0).value[0], static_cast<double>(net.params().at(0).value[0]));
}

}  // namespace
}  // namespace minet
