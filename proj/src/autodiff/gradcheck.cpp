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

#include "minet/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "minet/rng.hpp"

namespace minet::ad {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) / denom;
}

template <typename T>
GradCheckReport finite_diff_check(const std::function<T(ParamStore<T>&)>& f,
                                  ParamStore<T>& params, double eps, double tol,
                                  std::uint64_t seed, std::size_t max_coords) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_check: eps must be positive");
  Rng rng(seed);
  GradCheckReport report;
  report.tolerance = tol;
  double sum_rel = 0.0;
  auto eval = [&f, &params]() {
    const double v = static_cast<double>(f(params));
    if (!std::isfinite(v)) throw std::domain_error("finite_diff_check: non-finite objective");
    return v;
  };
  eval();
  for (std::size_t t = 0; t < params.size(); ++t) {
    Parameter<T>& p = params.at(t);
    std::vector<std::size_t> coords(p.value.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > max_coords) {
      rng.shuffle(coords);
      coords.resize(max_coords);
      std::sort(coords.begin(), coords.end());
    }
    TensorCheck tc{p.name, 0, 0.0};
    for (std::size_t idx : coords) {
      const T saved = p.value[idx];
      p.value[idx] = static_cast<T>(saved + eps);
      const double plus = eval();
      p.value[idx] = static_cast<T>(saved - eps);
      const double minus = eval();
      p.value[idx] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double rel = relative_error(static_cast<double>(p.grad[idx]), numeric);
      tc.max_rel_error = std::max(tc.max_rel_error, rel);
      sum_rel += rel;
      ++tc.checked;
    }
    report.checked += tc.checked;
    report.max_rel_error = std::max(report.max_rel_error, tc.max_rel_error);
    report.tensors.push_back(std::move(tc));
  }
  report.mean_rel_error = report.checked ? sum_rel / report.checked : 0.0;
  report.passed = report.max_rel_error < tol;
  return report;
}

template <typename T>
GradCheckReport check_graph(const std::function<Var<T>(Tape<T>&, ParamStore<T>&)>& build,
                            ParamStore<T>& params, double eps, double tol, std::uint64_t seed,
                            std::size_t max_coords) {
  params.zero_grad();
  {
    Tape<T> tape(true);
    Var<T> loss = build(tape, params);
    tape.backward(loss);
  }
  std::function<T(ParamStore<T>&)> f = [&build](ParamStore<T>& ps) {
    Tape<T> probe(false);
    return build(probe, ps)->value[0];
  };
  return finite_diff_check<T>(f, params, eps, tol, seed, max_coords);
}

template GradCheckReport finite_diff_check(const std::function<float(ParamStore<float>&)>&,
                                           ParamStore<float>&, double, double, std::uint64_t,
                                           std::size_t);
template GradCheckReport finite_diff_check(const std::function<double(ParamStore<double>&)>&,
                                           ParamStore<double>&, double, double, std::uint64_t,
                                           std::size_t);
template GradCheckReport check_graph(
    const std::function<Var<float>(Tape<float>&, ParamStore<float>&)>&, ParamStore<float>&,
    double, double, std::uint64_t, std::size_t);
template GradCheckReport check_graph(
    const std::function<Var<double>(Tape<double>&, ParamStore<double>&)>&, ParamStore<double>&,
    double, double, std::uint64_t, std::size_t);

}  // namespace minet::ad
