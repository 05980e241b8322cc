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
#include <numbers>

#include "minet/loss.hpp"
#include "minet/rng.hpp"

namespace minet {
namespace {

Tensor4<double> uniform_map(Shape4 s, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  Tensor4<double> t(s);
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

Tensor4<double> binary_map(Shape4 s, std::uint64_t seed) {
  Rng rng(seed);
  Tensor4<double> t(s);
  for (auto& v : t.values()) v = rng.bernoulli(0.4) ? 1.0 : 0.0;
  return t;
}

// Scalar oracle: explicit 2-D Gaussian window, per-window weighted moments.
double ssim_oracle(const Tensor4<double>& s, const Tensor4<double>& g) {
  double win[11][11], total = 0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      win[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * 1.5 * 1.5));
      total += win[i][j];
    }
  const double c1 = 1e-4, c2 = 9e-4;
  double acc = 0;
  int count = 0;
  for (int b = 0; b < s.n(); ++b)
    for (int y0 = 0; y0 + 11 <= s.h(); ++y0)
      for (int x0 = 0; x0 + 11 <= s.w(); ++x0) {
        double mx = 0, my = 0;
        for (int i = 0; i < 11; ++i)
          for (int j = 0; j < 11; ++j) {
            mx += win[i][j] / total * s(b, 0, y0 + i, x0 + j);
            my += win[i][j] / total * g(b, 0, y0 + i, x0 + j);
          }
        double vx = 0, vy = 0, cxy = 0;
        for (int i = 0; i < 11; ++i)
          for (int j = 0; j < 11; ++j) {
            const double dx = s(b, 0, y0 + i, x0 + j) - mx, dy = g(b, 0, y0 + i, x0 + j) - my;
            vx += win[i][j] / total * dx * dx;
            vy += win[i][j] / total * dy * dy;
            cxy += win[i][j] / total * dx * dy;
          }
        acc += (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++count;
      }
  return 1 - acc / count;
}

TEST(Bce, HalfPredictionIsLnTwo) {
  const auto g = binary_map({2, 1, 12, 12}, 1);
  EXPECT_NEAR(bce_loss(Tensor4<double>(g.shape(), 0.5), g), std::numbers::ln2, 1e-12);
}

TEST(Bce, MatchesDefinitionAndIsNonNegative) {
  const auto s = uniform_map({2, 1, 6, 7}, 2), g = binary_map({2, 1, 6, 7}, 3);
  double want = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    want -= g[i] * std::log(s[i]) + (1 - g[i]) * std::log(1 - s[i]);
  want /= static_cast<double>(s.size());
  EXPECT_NEAR(bce_loss(s, g), want, 1e-12);
  EXPECT_GE(bce_loss(s, g), 0.0);
}

TEST(Bce, ClampBoundsPerfectAndHopelessPredictions) {
  const auto g = binary_map({1, 1, 8, 8}, 4);
  EXPECT_LE(bce_loss(g, g), 1e-6 * std::abs(std::log(1e-7)));
  Tensor4<double> wrong(g.shape());
  for (std::size_t i = 0; i < g.size(); ++i) wrong[i] = 1 - g[i];
  EXPECT_NEAR(bce_loss(wrong, g), -std::log(1e-7), 1e-6);
  const auto grad = bce_grad(wrong, g);
  for (double v : grad.values()) EXPECT_EQ(v, 0.0);
}

TEST(Bce, FloatAgreesWithDouble) {
  const auto s = uniform_map({1, 1, 9, 9}, 5, 0.05, 0.95), g = binary_map({1, 1, 9, 9}, 6);
  EXPECT_NEAR(bce_loss(s.cast<float>(), g.cast<float>()), bce_loss(s, g), 1e-5);
}

TEST(Ssim, IdenticalMapsGiveZeroLoss) {
  const auto g = binary_map({2, 1, 20, 17}, 7);
  EXPECT_LT(ssim_loss(g, g), 1e-6);
  const auto s = uniform_map({1, 1, 12, 12}, 8);
  EXPECT_LT(ssim_loss(s, s), 1e-12);
}

TEST(Ssim, ConstantMapsAreNearlyPerfect) {
  const Tensor4<double> a(Shape4{1, 1, 16, 16}, 0.7), b(Shape4{1, 1, 16, 16}, 0.7);
  EXPECT_LT(ssim_loss(a, b), 0.01);
}

TEST(Ssim, MatchesScalarOracle) {
  const auto s = uniform_map({2, 1, 16, 16}, 9), g = binary_map({2, 1, 16, 16}, 10);
  EXPECT_NEAR(ssim_loss(s, g), ssim_oracle(s, g), 1e-9);
  const auto r = uniform_map({1, 1, 13, 19}, 11), q = uniform_map({1, 1, 13, 19}, 12);
  EXPECT_NEAR(ssim_loss(r, q), ssim_oracle(r, q), 1e-9);
}

TEST(Ssim, RejectsSmallOrMultiChannelMaps) {
  EXPECT_THROW(ssim_loss(uniform_map({1, 1, 10, 20}, 1), uniform_map({1, 1, 10, 20}, 2)),
               ShapeError);
  EXPECT_THROW(ssim_loss(uniform_map({1, 2, 12, 12}, 1), uniform_map({1, 2, 12, 12}, 2)),
               ShapeError);
  EXPECT_THROW(ssim_loss(uniform_map({1, 1, 12, 12}, 1), uniform_map({1, 1, 12, 13}, 2)),
               ShapeError);
}

TEST(Ssim, GradientMatchesCentralDifference) {
  auto s = uniform_map({1, 1, 12, 13}, 13);
  const auto g = binary_map({1, 1, 12, 13}, 14);
  const auto grad = ssim_grad(s, g);
  for (std::size_t i : {0u, 5u, 77u, 155u}) {
    const double keep = s[i];
    s[i] = keep + 1e-6;
    const double up = ssim_loss(s, g);
    s[i] = keep - 1e-6;
    const double down = ssim_loss(s, g);
    s[i] = keep;
    EXPECT_NEAR(grad[i], (up - down) / 2e-6, 1e-7);
  }
}

TEST(Ssim, GaussianTapsAreNormalized) {
  const auto k = ssim_gaussian();
  double sum = 0;
  for (double v : k) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_EQ(k[0], k[10]);
  EXPECT_GT(k[5], k[4]);
}

TEST(Hybrid, TotalIsTheSumOfTenTerms) {
  const auto g = binary_map({2, 1, 14, 14}, 15);
  std::array<Tensor4<double>, 5> heads;
  for (int i = 0; i < 5; ++i) heads[i] = uniform_map(g.shape(), 20 + i, 0.01, 0.99);
  const LossReport r = hybrid_loss<double>(heads, g);
  double sum = 0;
  for (int i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(r.per_head[i].first, bce_loss(heads[i], g));
    EXPECT_DOUBLE_EQ(r.per_head[i].second, ssim_loss(heads[i], g));
    sum += r.per_head[i].first + r.per_head[i].second;
  }
  EXPECT_NEAR(r.total, sum, 1e-12);
}

TEST(Hybrid, TapeVersionAgreesAndBackpropagatesToEveryHead) {
  const auto g = binary_map({1, 1, 12, 12}, 16);
  ad::Tape<double> tape;
  std::vector<ad::Var<double>> heads;
  std::array<Tensor4<double>, 5> values;
  for (int i = 0; i < 5; ++i) {
    values[i] = uniform_map(g.shape(), 30 + i, 0.01, 0.99);
    heads.push_back(tape.variable(values[i]));
  }
  LossReport rep;
  const auto loss = ad::hybrid_loss<double>(tape, heads, g, &rep);
  EXPECT_NEAR(loss->value[0], hybrid_loss<double>(values, g).total, 1e-12);
  EXPECT_NEAR(rep.total, loss->value[0], 1e-12);
  tape.backward(loss);
  for (int i = 0; i < 5; ++i) {
    const auto want_b = bce_grad(values[i], g), want_s = ssim_grad(values[i], g);
    for (std::size_t j = 0; j < g.size(); ++j)
      EXPECT_NEAR(heads[i]->grad[j], want_b[j] + want_s[j], 1e-12);
  }
}

}  // namespace
}  // namespace minet
