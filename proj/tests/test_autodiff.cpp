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

#include "minet/autodiff/gradcheck.hpp"
#include "minet/autodiff/ops.hpp"
#include "minet/autodiff/optim.hpp"
#include "minet/gradcheck_suite.hpp"

namespace minet::ad {
namespace {

Tensor4<double> random_tensor(Shape4 s, std::uint64_t seed) {
  Rng rng(seed);
  Tensor4<double> t(s);
  for (auto& v : t.values()) v = rng.uniform(-1, 1);
  return t;
}

TEST(ParamStore, KeepsInsertionOrderAndRejectsDuplicates) {
  ParamStore<double> s;
  s.add("b", random_tensor({1, 1, 2, 2}, 1));
  s.add("a", random_tensor({2, 1, 1, 1}, 2));
  EXPECT_EQ(s.at(0).name, "b");
  EXPECT_EQ(s.element_count(), 6u);
  EXPECT_EQ(s.get("a").grad.shape(), s.get("a").value.shape());
  EXPECT_THROW(s.add("a", random_tensor({1, 1, 1, 1}, 3)), std::invalid_argument);
  EXPECT_THROW(s.get("zzz"), std::out_of_range);
  ParamStore<double> copy = s;
  copy.get("a").value[0] = 42;
  EXPECT_NE(s.get("a").value[0], 42);
}

TEST(Tape, RejectsInvalidBackward) {
  Tape<double> tape;
  auto x = tape.variable(random_tensor({1, 1, 2, 2}, 1));
  auto y = relu(tape, x);
  EXPECT_THROW(tape.backward(y), AutodiffError);  // not a scalar
  EXPECT_THROW(tape.backward(nullptr), AutodiffError);
  Tape<double> other;
  auto z = sum(tape, y);
  EXPECT_THROW(other.backward(z), AutodiffError);
  Tape<double> off(false);
  auto w = sum(off, off.variable(random_tensor({1, 1, 1, 2}, 2)));
  EXPECT_THROW(off.backward(w), AutodiffError);
  EXPECT_EQ(off.size(), 0u);
}

TEST(Tape, FanOutAccumulatesAndParametersCollectGradients) {
  ParamStore<double> store;
  auto& p = store.add("p", random_tensor({1, 1, 2, 3}, 4));
  store.zero_grad();
  for (int pass = 0; pass < 2; ++pass) {
    Tape<double> tape;
    auto v = tape.parameter(p);
    auto loss = sum(tape, add(tape, v, scale(tape, v, 2.0)));
    tape.backward(loss);
  }
  for (double g : p.grad.values()) EXPECT_DOUBLE_EQ(g, 6.0);
  store.zero_grad();
  for (double g : p.grad.values()) EXPECT_EQ(g, 0.0);
}

TEST(Tape, ConstantsDoNotRecordHistory) {
  Tape<double> tape;
  auto c = tape.constant(random_tensor({1, 1, 2, 2}, 5));
  auto y = relu(tape, c);
  EXPECT_FALSE(y->requires_grad);
}

TEST(Ops, ShapeChecks) {
  Tape<double> tape;
  auto x = tape.variable(random_tensor({1, 2, 3, 3}, 1));
  EXPECT_THROW(add(tape, x, tape.variable(random_tensor({1, 1, 3, 3}, 2))), ShapeError);
  EXPECT_THROW(gather_channels(tape, x, {0, 2}), ShapeError);
  EXPECT_THROW(dot(tape, x, random_tensor({1, 2, 3, 2}, 3)), ShapeError);
  const auto spec = ConvSpec::dense(2, 2, 3, 1, 1);
  EXPECT_THROW(conv2d(tape, x, tape.variable(random_tensor({2, 1, 3, 3}, 4)), Var<double>{}, spec),
               ShapeError);
}

TEST(GradCheck, RelativeErrorFloor) {
  EXPECT_DOUBLE_EQ(relative_error(2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(relative_error(1e-6, 0.0), 1e-3);
  EXPECT_DOUBLE_EQ(relative_error(0.0, 0.0), 0.0);
}

TEST(GradCheck, DetectsAWrongGradient) {
  ParamStore<double> store;
  store.add("x", random_tensor({1, 1, 3, 3}, 7));
  // Analytic side claims d/dx sum(x^2) = x instead of 2x.
  auto f = [](ParamStore<double>& s) {
    double acc = 0;
    for (double v : s.get("x").value.values()) acc += v * v;
    return acc;
  };
  store.get("x").grad = store.get("x").value;
  const auto bad = finite_diff_check<double>(f, store, 1e-6, 1e-5);
  EXPECT_FALSE(bad.passed);
  for (std::size_t i = 0; i < 9; ++i) store.get("x").grad[i] = 2 * store.get("x").value[i];
  const auto good = finite_diff_check<double>(f, store, 1e-6, 1e-5);
  EXPECT_TRUE(good.passed);
  EXPECT_EQ(good.checked, 9u);
}

TEST(GradCheck, ProbesRestoreParameters) {
  ParamStore<double> store;
  store.add("w", random_tensor({2, 2, 3, 3}, 8));
  const auto before = store.get("w").value.vec();
  const auto x = random_tensor({1, 2, 5, 5}, 9);
  const auto spec = ConvSpec::dense(2, 2, 3, 1, 1);
  const auto r = check_graph<double>(
      [&](Tape<double>& tape, ParamStore<double>& s) {
        auto y = conv2d(tape, tape.constant(x), tape.parameter(s.get("w")), Var<double>{}, spec);
        return dot(tape, y, x);
      },
      store, 1e-6, 1e-5);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(store.get("w").value.vec(), before);
}

TEST(GradCheck, SuiteCoversEveryFamily) {
  const auto results = gradcheck_suite({});
  std::vector<std::string> names;
  for (const auto& r : results) {
    names.push_back(r.family);
    EXPECT_TRUE(r.report.passed) << r.family << " max rel " << r.report.max_rel_error;
    EXPECT_LT(r.report.max_rel_error, 1e-5) << r.family;
    EXPECT_GT(r.report.checked, 0u) << r.family;
  }
  for (const char* f : {"conv.dense", "conv.depthwise", "conv.grouped_pointwise",
                        "batchnorm.train", "batchnorm.infer", "relu", "sigmoid", "resize.up",
                        "resize.down", "dropout", "loss.bce", "loss.ssim", "loss.hybrid",
                        "mi.standard", "mi.concat_dsconv", "mi.sum_dsconv"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), f), names.end()) << f;
  }
}

TEST(Adam, MatchesTextbookUpdate) {
  ParamStore<double> store;
  auto& p = store.add("w", random_tensor({1, 1, 1, 4}, 10));
  std::vector<double> w = p.value.vec(), m(4, 0), v(4, 0);
  AdamState<double> st;
  Rng rng(11);
  for (int t = 1; t <= 5; ++t) {
    for (std::size_t j = 0; j < 4; ++j) p.grad[j] = rng.uniform(-2, 2);
    for (std::size_t j = 0; j < 4; ++j) {
      const double g = p.grad[j];
      m[j] = 0.9 * m[j] + 0.1 * g;
      v[j] = 0.999 * v[j] + 0.001 * g * g;
      const double mh = m[j] / (1 - std::pow(0.9, t)), vh = v[j] / (1 - std::pow(0.999, t));
      w[j] -= 4e-3 * mh / (std::sqrt(vh) + 1e-8);
    }
    adam_step(store, st);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(p.value[j], w[j], 1e-13);
  }
  EXPECT_EQ(st.step, 5);
  store.add("late", random_tensor({1, 1, 1, 1}, 12));
  EXPECT_THROW(adam_step(store, st), std::logic_error);
}

TEST(Xavier, BoundAndSpread) {
  const auto spec = ConvSpec::dense(16, 32, 3, 2, 1);
  EXPECT_DOUBLE_EQ(xavier_bound(spec), std::sqrt(6.0 / (16 * 9 + 32 * 9)));
  EXPECT_DOUBLE_EQ(xavier_bound(ConvSpec::depthwise(64, 3, 1, 1, 1)), std::sqrt(6.0 / 18));
  Rng rng(13);
  const auto w = xavier_init<double>(spec, rng);
  const double a = xavier_bound(spec);
  double mean = 0, sq = 0;
  for (double v : w.kernels.values()) {
    EXPECT_LE(std::abs(v), a);
    mean += v;
    sq += v * v;
  }
  const double n = static_cast<double>(w.kernels.size());
  EXPECT_NEAR(mean / n, 0.0, 0.05 * a);
  EXPECT_NEAR(sq / n, a * a / 3, 0.05 * a * a);
  EXPECT_TRUE(w.bias.empty());
  const auto wb = xavier_init<double>(ConvSpec::pointwise(16, 1, 1, true), rng);
  EXPECT_EQ(wb.bias, std::vector<double>(1, 0.0));
}

}  // namespace
}  // namespace minet::ad
