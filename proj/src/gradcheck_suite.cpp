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


#include "minet/gradcheck_suite.hpp"

#include <cmath>
#include <functional>

#include "minet/autodiff/ops.hpp"
#include "minet/loss.hpp"
#include "minet/model.hpp"

namespace minet {

namespace {

using T = double;
using Build = std::function<ad::Var<T>(ad::Tape<T>&, ad::ParamStore<T>&)>;

Tensor4<T> random(const Shape4& s, Rng& rng, double lo = -1, double hi = 1) {
  Tensor4<T> t(s);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(lo, hi);
  return t;
}

// Values bounded away from zero so kinks stay outside the probe interval.
Tensor4<T> away_from_zero(const Shape4& s, Rng& rng) {
  Tensor4<T> t(s);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double m = rng.uniform(0.1, 1.0);
    t.data()[i] = rng.bernoulli(0.5) ? m : -m;
  }
  return t;
}

Tensor4<T> binary(const Shape4& s, Rng& rng) {
  Tensor4<T> t(s);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.bernoulli(0.5) ? 1 : 0;
  return t;
}

// Random projection to a scalar so that every output coordinate matters.
ad::Var<T> project(ad::Tape<T>& tape, const ad::Var<T>& y, std::uint64_t seed) {
  Rng rng(seed ^ 0xABCDEFULL);
  return ad::dot(tape, y, random(y->value.shape(), rng));
}

}  // namespace

std::vector<GradFamilyResult> gradcheck_suite(const GradSuiteOptions& opts) {
  std::vector<GradFamilyResult> results;
  Rng rng(opts.seed);
  auto run = [&](const std::string& family, ad::ParamStore<T>& store, const Build& build) {
    auto report = ad::check_graph<T>(build, store, opts.eps, opts.tolerance,
                                     opts.seed + results.size(), opts.max_coords);
    results.push_back({family, std::move(report)});
  };
  auto conv_family = [&](const std::string& family, const Shape4& xs, const ConvSpec& spec) {
    ad::ParamStore<T> st;
    st.add("x", random(xs, rng));
    st.add("w", random(spec.weight_shape(), rng));
    if (spec.bias) st.add("b", random(Shape4{spec.c_out, 1, 1, 1}, rng));
    run(family, st, [spec](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      ad::Var<T> b = spec.bias ? t.parameter(p.get("b")) : ad::Var<T>{};
      auto y = ad::conv2d(t, t.parameter(p.get("x")), t.parameter(p.get("w")), b, spec);
      return project(t, y, 1);
    });
  };

  conv_family("conv.dense", {1, 3, 8, 8}, ConvSpec{3, 1, 1, 1, 1, 3, 4, true});
  conv_family("conv.strided_dilated", {1, 2, 8, 8}, ConvSpec{3, 2, 2, 2, 1, 2, 3, false});
  conv_family("conv.depthwise", {1, 8, 8, 8}, ConvSpec::depthwise(8, 3, 1, 2, 2));
  conv_family("conv.grouped_pointwise", {1, 8, 8, 8}, ConvSpec::pointwise(8, 4, 4, true));

  for (Mode mode : {Mode::Train, Mode::Infer}) {
    ad::ParamStore<T> st;
    st.add("x", random({2, 4, 4, 4}, rng, -2, 2));
    st.add("gamma", random({4, 1, 1, 1}, rng, 0.5, 1.5));
    st.add("beta", random({4, 1, 1, 1}, rng));
    auto rm = std::make_shared<Tensor4<T>>(random({4, 1, 1, 1}, rng, -0.2, 0.2));
    auto rv = std::make_shared<Tensor4<T>>(random({4, 1, 1, 1}, rng, 0.5, 1.5));
    run(mode == Mode::Train ? "batchnorm.train" : "batchnorm.infer", st,
        [mode, rm, rv](ad::Tape<T>& t, ad::ParamStore<T>& p) {
          Tensor4<T> m = *rm, v = *rv;
          auto y = ad::batchnorm(t, t.parameter(p.get("x")), t.parameter(p.get("gamma")),
                                 t.parameter(p.get("beta")), m, v, mode);
          return project(t, y, 2);
        });
  }

  {
    ad::ParamStore<T> st;
    st.add("x", away_from_zero({1, 4, 8, 8}, rng));
    run("relu", st, [](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      return project(t, ad::relu(t, t.parameter(p.get("x"))), 3);
    });
  }
  {
    ad::ParamStore<T> st;
    st.add("x", random({1, 4, 8, 8}, rng, -3, 3));
    run("sigmoid", st, [](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      return project(t, ad::sigmoid(t, t.parameter(p.get("x"))), 4);
    });
  }
  for (auto [name, ih, oh] : {std::tuple{"resize.up", 4, 8}, std::tuple{"resize.down", 8, 5}}) {
    ad::ParamStore<T> st;
    st.add("x", random({1, 2, ih, ih}, rng));
    const int out = oh;
    run(name, st, [out](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      return project(t, ad::resize_bilinear(t, t.parameter(p.get("x")), out, out), 5);
    });
  }
  {
    ad::ParamStore<T> st;
    st.add("a", random({1, 4, 8, 8}, rng));
    st.add("b", random({1, 4, 8, 8}, rng));
    auto factor = std::make_shared<Tensor4<T>>(random({1, 4, 8, 8}, rng));
    run("elementwise", st, [factor](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      auto a = t.parameter(p.get("a"));
      auto b = t.parameter(p.get("b"));
      auto y = ad::add(t, ad::scale(t, a, T(1.5)), ad::mul_constant(t, b, *factor));
      return ad::add(t, project(t, y, 6), ad::sum(t, a));
    });
  }
  {
    ad::ParamStore<T> st;
    for (int i = 0; i < 4; ++i) st.add("x" + std::to_string(i), random({1, 2, 8, 8}, rng));
    run("concat_regroup", st, [](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      std::vector<ad::Var<T>> four;
      for (int i = 0; i < 4; ++i) four.push_back(t.parameter(p.get("x" + std::to_string(i))));
      auto a = project(t, ad::concat(t, four), 7);
      auto b = project(t, regroup(t, four), 8);
      return ad::add(t, a, b);
    });
  }
  {
    ad::ParamStore<T> st;
    st.add("x", random({1, 4, 8, 8}, rng));
    const std::uint64_t mask_seed = opts.seed + 99;
    run("dropout", st, [mask_seed](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      Rng mask(mask_seed);
      return project(t, ad::dropout(t, t.parameter(p.get("x")), 0.25, mask, Mode::Train), 9);
    });
  }

  const Shape4 map{1, 1, 12, 12};
  {
    ad::ParamStore<T> st;
    st.add("s", random(map, rng, 0.05, 0.95));
    auto g = std::make_shared<Tensor4<T>>(binary(map, rng));
    run("loss.bce", st, [g](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      return ad::bce_loss(t, t.parameter(p.get("s")), *g);
    });
  }
  {
    ad::ParamStore<T> st;
    st.add("s", random(map, rng, 0.05, 0.95));
    auto g = std::make_shared<Tensor4<T>>(binary(map, rng));
    run("loss.ssim", st, [g](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      return ad::ssim_loss(t, t.parameter(p.get("s")), *g);
    });
  }
  {
    ad::ParamStore<T> st;
    for (int i = 0; i < 5; ++i) st.add("s" + std::to_string(i), random(map, rng, 0.05, 0.95));
    auto g = std::make_shared<Tensor4<T>>(binary(map, rng));
    run("loss.hybrid", st, [g](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      std::vector<ad::Var<T>> heads;
      for (int i = 0; i < 5; ++i) heads.push_back(t.parameter(p.get("s" + std::to_string(i))));
      return ad::hybrid_loss<T>(t, heads, *g);
    });
  }

  for (MIVariant v : all_variants()) {
    ad::ParamStore<T> st;
    const MIModule mod("mi", 4, v);
    mod.register_params(st, rng);
    st.add("x", away_from_zero({1, 4, 8, 8}, rng));
    run("mi." + std::string(variant_name(v)), st, [mod](ad::Tape<T>& t, ad::ParamStore<T>& p) {
      return project(t, mod.forward(t, t.parameter(p.get("x")), p), 10);
    });
  }
  return results;
}

}  // namespace minet
