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


#include "minet/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "minet/autodiff/ops.hpp"

namespace minet {

namespace {

constexpr int K = kSsimWindow;

template <typename T>
void check_pair(const Tensor4<T>& s, const Tensor4<T>& g, const char* what) {
  if (!(s.shape() == g.shape())) {
    throw ShapeError(std::string(what) + ": shape mismatch " + s.shape().str() + " vs " +
                     g.shape().str());
  }
}

template <typename T>
void check_ssim(const Tensor4<T>& s, const Tensor4<T>& g) {
  check_pair(s, g, "ssim_loss");
  if (s.c() != 1) throw ShapeError("ssim_loss expects single-channel maps, got " + s.shape().str());
  if (s.h() < K || s.w() < K) {
    throw ShapeError("ssim_loss needs maps of at least 11x11, got " + s.shape().str());
  }
}

// Valid separable correlation of an h x w plane with the Gaussian window.
std::vector<double> filter_valid(const std::vector<double>& in, int h, int w,
                                 const std::array<double, K>& k) {
  const int oh = h - K + 1, ow = w - K + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < K; ++i) acc += k[i] * in[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow, 0.0);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < K; ++i) acc += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

// Adjoint of filter_valid: scatters an (h-10) x (w-10) map back to h x w.
std::vector<double> filter_valid_adjoint(const std::vector<double>& in, int h, int w,
                                         const std::array<double, K>& k) {
  const int oh = h - K + 1, ow = w - K + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow, 0.0);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      const double v = in[static_cast<std::size_t>(y) * ow + x];
      for (int i = 0; i < K; ++i) tmp[static_cast<std::size_t>(y + i) * ow + x] += k[i] * v;
    }
  std::vector<double> out(static_cast<std::size_t>(h) * w, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      const double v = tmp[static_cast<std::size_t>(y) * ow + x];
      for (int i = 0; i < K; ++i) out[static_cast<std::size_t>(y) * w + x + i] += k[i] * v;
    }
  return out;
}

struct SsimPlane {
  std::vector<double> mx, my, exx, eyy, exy;
};

template <typename T>
SsimPlane plane_moments(const Tensor4<T>& s, const Tensor4<T>& g, int b,
                        const std::array<double, K>& k) {
  const int h = s.h(), w = s.w();
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  const T* ps = s.plane(b, 0);
  const T* pg = g.plane(b, 0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(ps[i]);
    y[i] = static_cast<double>(pg[i]);
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  return {filter_valid(x, h, w, k), filter_valid(y, h, w, k), filter_valid(xx, h, w, k),
          filter_valid(yy, h, w, k), filter_valid(xy, h, w, k)};
}

struct SsimTerms {
  double a1, a2, b1, b2, s;
};

inline SsimTerms ssim_terms(const SsimPlane& m, std::size_t i) {
  const double mx = m.mx[i], my = m.my[i];
  const double vx = m.exx[i] - mx * mx;
  const double vy = m.eyy[i] - my * my;
  const double cxy = m.exy[i] - mx * my;
  SsimTerms t;
  t.a1 = 2 * mx * my + kSsimC1;
  t.a2 = 2 * cxy + kSsimC2;
  t.b1 = mx * mx + my * my + kSsimC1;
  t.b2 = vx + vy + kSsimC2;
  t.s = (t.a1 * t.a2) / (t.b1 * t.b2);
  return t;
}

}  // namespace

std::array<double, kSsimWindow> ssim_gaussian() {
  std::array<double, K> k{};
  double sum = 0;
  for (int i = 0; i < K; ++i) {
    const double d = i - K / 2;
    k[i] = std::exp(-d * d / (2 * kSsimSigma * kSsimSigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

template <typename T>
T bce_loss(const Tensor4<T>& s, const Tensor4<T>& g) {
  check_pair(s, g, "bce_loss");
  double acc = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double p = std::clamp(static_cast<double>(s.data()[i]), kProbClamp, 1 - kProbClamp);
    const double t = static_cast<double>(g.data()[i]);
    acc -= t * std::log(p) + (1 - t) * std::log(1 - p);
  }
  return static_cast<T>(acc / static_cast<double>(s.size()));
}

template <typename T>
Tensor4<T> bce_grad(const Tensor4<T>& s, const Tensor4<T>& g) {
  check_pair(s, g, "bce_loss");
  Tensor4<T> out(s.shape(), T(0));
  const double inv_n = 1.0 / static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double p = static_cast<double>(s.data()[i]);
    if (p < kProbClamp || p > 1 - kProbClamp) continue;
    const double t = static_cast<double>(g.data()[i]);
    out.data()[i] = static_cast<T>(inv_n * (-t / p + (1 - t) / (1 - p)));
  }
  return out;
}

template <typename T>
T ssim_loss(const Tensor4<T>& s, const Tensor4<T>& g) {
  check_ssim(s, g);
  const auto k = ssim_gaussian();
  double acc = 0;
  std::size_t count = 0;
  for (int b = 0; b < s.n(); ++b) {
    const SsimPlane m = plane_moments(s, g, b, k);
    for (std::size_t i = 0; i < m.mx.size(); ++i) acc += ssim_terms(m, i).s;
    count += m.mx.size();
  }
  return static_cast<T>(1.0 - acc / static_cast<double>(count));
}

template <typename T>
Tensor4<T> ssim_grad(const Tensor4<T>& s, const Tensor4<T>& g) {
  check_ssim(s, g);
  const auto k = ssim_gaussian();
  const int h = s.h(), w = s.w();
  const std::size_t windows = static_cast<std::size_t>(h - K + 1) * (w - K + 1);
  const double scale = -1.0 / static_cast<double>(windows * s.n());
  Tensor4<T> out(s.shape(), T(0));
  for (int b = 0; b < s.n(); ++b) {
    const SsimPlane m = plane_moments(s, g, b, k);
    std::vector<double> gm(windows), gxx(windows), gxy(windows);
    for (std::size_t i = 0; i < windows; ++i) {
      const SsimTerms t = ssim_terms(m, i);
      const double mx = m.mx[i], my = m.my[i];
      gm[i] = t.s * (2 * my / t.a1 - 2 * my / t.a2 - 2 * mx / t.b1 + 2 * mx / t.b2);
      gxx[i] = -t.s / t.b2;
      gxy[i] = 2 * t.s / t.a2;
    }
    const auto tm = filter_valid_adjoint(gm, h, w, k);
    const auto txx = filter_valid_adjoint(gxx, h, w, k);
    const auto txy = filter_valid_adjoint(gxy, h, w, k);
    const T* ps = s.plane(b, 0);
    const T* pg = g.plane(b, 0);
    T* dst = out.plane(b, 0);
    for (std::size_t p = 0; p < static_cast<std::size_t>(h) * w; ++p) {
      const double x = static_cast<double>(ps[p]), y = static_cast<double>(pg[p]);
      dst[p] = static_cast<T>(scale * (tm[p] + 2 * x * txx[p] + y * txy[p]));
    }
  }
  return out;
}

template <typename T>
LossReport hybrid_loss(std::span<const Tensor4<T>> heads, const Tensor4<T>& g) {
  if (heads.size() != 5) {
    throw std::invalid_argument("hybrid_loss expects 5 heads, got " +
                                std::to_string(heads.size()));
  }
  LossReport r;
  for (std::size_t i = 0; i < 5; ++i) {
    r.per_head[i] = {static_cast<double>(bce_loss(heads[i], g)),
                     static_cast<double>(ssim_loss(heads[i], g))};
    r.total += r.per_head[i].first + r.per_head[i].second;
  }
  return r;
}

namespace ad {

namespace {

template <typename T>
Var<T> scalar_loss(Tape<T>& tape, const Var<T>& s, const Tensor4<T>& g, T value,
                   Tensor4<T> (*grad)(const Tensor4<T>&, const Tensor4<T>&)) {
  Tensor4<T> out(Shape4{1, 1, 1, 1}, value);
  return tape.record(std::move(out), {s}, [g, grad](Node<T>& node) {
    const T up = node.grad.data()[0];
    Tensor4<T> gs = grad(node.inputs[0]->value, g);
    for (std::size_t i = 0; i < gs.size(); ++i) gs.data()[i] *= up;
    node.inputs[0]->accumulate(gs);
  });
}

}  // namespace

template <typename T>
Var<T> bce_loss(Tape<T>& tape, const Var<T>& s, const Tensor4<T>& g) {
  return scalar_loss(tape, s, g, minet::bce_loss(s->value, g), &minet::bce_grad<T>);
}

template <typename T>
Var<T> ssim_loss(Tape<T>& tape, const Var<T>& s, const Tensor4<T>& g) {
  return scalar_loss(tape, s, g, minet::ssim_loss(s->value, g), &minet::ssim_grad<T>);
}

template <typename T>
Var<T> hybrid_loss(Tape<T>& tape, std::span<const Var<T>> heads, const Tensor4<T>& g,
                   LossReport* report) {
  if (heads.size() != 5) {
    throw std::invalid_argument("hybrid_loss expects 5 heads, got " +
                                std::to_string(heads.size()));
  }
  LossReport r;
  Var<T> total;
  for (std::size_t i = 0; i < 5; ++i) {
    const Var<T> b = bce_loss(tape, heads[i], g);
    const Var<T> s = ssim_loss(tape, heads[i], g);
    r.per_head[i] = {static_cast<double>(b->value.data()[0]),
                     static_cast<double>(s->value.data()[0])};
    r.total += r.per_head[i].first + r.per_head[i].second;
    const Var<T> term = add(tape, b, s);
    total = total ? add(tape, total, term) : term;
  }
  if (report) *report = r;
  return total;
}

}  // namespace ad

#define MINET_INSTANTIATE(T)                                                                 \
  template T bce_loss(const Tensor4<T>&, const Tensor4<T>&);                                 \
  template Tensor4<T> bce_grad(const Tensor4<T>&, const Tensor4<T>&);                        \
  template T ssim_loss(const Tensor4<T>&, const Tensor4<T>&);                                \
  template Tensor4<T> ssim_grad(const Tensor4<T>&, const Tensor4<T>&);                       \
  template LossReport hybrid_loss(std::span<const Tensor4<T>>, const Tensor4<T>&);           \
  template ad::Var<T> ad::bce_loss(ad::Tape<T>&, const ad::Var<T>&, const Tensor4<T>&);      \
  template ad::Var<T> ad::ssim_loss(ad::Tape<T>&, const ad::Var<T>&, const Tensor4<T>&);     \
  template ad::Var<T> ad::hybrid_loss(ad::Tape<T>&, std::span<const ad::Var<T>>,             \
                                      const Tensor4<T>&, LossReport*);

MINET_INSTANTIATE(float)
MINET_INSTANTIATE(double)

}  // namespace minet
