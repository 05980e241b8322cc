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

#include "minet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "minet/parallel.hpp"

namespace minet {

std::string Shape4::str() const {
  std::ostringstream os;
  os << "(" << n << "," << c << "," << h << "," << w << ")";
  return os.str();
}

void check_shape(const Shape4& s) {
  if (s.n < 1 || s.c < 1 || s.h < 1 || s.w < 1) {
    throw ShapeError("tensor dimensions must be >= 1, got " + s.str());
  }
}

template <typename T>
Tensor4<T>::Tensor4(Shape4 shape, T fill) : shape_(shape) {
  check_shape(shape);
  data_.assign(shape.count(), fill);
}

template <typename T>
Tensor4<T>::Tensor4(Shape4 shape, std::vector<T> data)
    : shape_(shape), data_(std::move(data)) {
  check_shape(shape);
  if (data_.size() != shape.count()) {
    throw ShapeError("buffer of " + std::to_string(data_.size()) +
                     " elements does not match shape " + shape.str());
  }
}

template <typename T>
void Tensor4<T>::fill(T v) {
  std::fill(data_.begin(), data_.end(), v);
}

template <typename T>
Tensor4<T> ewise_add(const Tensor4<T>& a, const Tensor4<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("ewise_add shape mismatch: " + a.shape().str() + " vs " +
                     b.shape().str());
  }
  Tensor4<T> out(a.shape());
  const T* pa = a.data();
  const T* pb = b.data();
  T* po = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) po[i] = pa[i] + pb[i];
  return out;
}

template <typename T>
Tensor4<T> concat_channels(std::span<const Tensor4<T>> parts) {
  if (parts.empty()) throw ShapeError("concat_channels: empty input list");
  const Shape4 first = parts.front().shape();
  int channels = 0;
  for (const auto& p : parts) {
    const Shape4& s = p.shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w) {
      throw ShapeError("concat_channels: part " + s.str() +
                       " incompatible with " + first.str());
    }
    channels += s.c;
  }
  Tensor4<T> out(Shape4{first.n, channels, first.h, first.w});
  const std::size_t plane = first.plane();
  for (int b = 0; b < first.n; ++b) {
    int offset = 0;
    for (const auto& p : parts) {
      std::memcpy(out.plane(b, offset), p.plane(b, 0), sizeof(T) * plane * p.c());
      offset += p.c();
    }
  }
  return out;
}

template <typename T>
Tensor4<T> slice_channels(const Tensor4<T>& x, int begin, int count) {
  if (begin < 0 || count < 1 || begin + count > x.c()) {
    throw ShapeError("slice_channels: range [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") outside " +
                     x.shape().str());
  }
  Tensor4<T> out(Shape4{x.n(), count, x.h(), x.w()});
  for (int b = 0; b < x.n(); ++b) {
    std::memcpy(out.plane(b, 0), x.plane(b, begin),
                sizeof(T) * x.shape().plane() * count);
  }
  return out;
}

std::vector<LinearTap> bilinear_taps(int in_size, int out_size) {
  std::vector<LinearTap> taps(out_size);
  const double scale = static_cast<double>(in_size) / out_size;
  for (int o = 0; o < out_size; ++o) {
    double src = (o + 0.5) * scale - 0.5;
    if (src < 0.0) src = 0.0;
    int i0 = static_cast<int>(std::floor(src));
    if (i0 > in_size - 1) i0 = in_size - 1;
    const int i1 = std::min(i0 + 1, in_size - 1);
    double w1 = src - i0;
    if (i1 == i0) w1 = 0.0;
    taps[o] = {i0, i1, w1};
  }
  return taps;
}

template <typename T>
Tensor4<T> resize_bilinear(const Tensor4<T>& x, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) {
    throw ShapeError("resize_bilinear: target size must be >= 1");
  }
  if (out_h == x.h() && out_w == x.w()) return x;
  const auto ty = bilinear_taps(x.h(), out_h);
  const auto tx = bilinear_taps(x.w(), out_w);
  Tensor4<T> out(Shape4{x.n(), x.c(), out_h, out_w});
  const int planes = x.n() * x.c();
  parallel_for(planes, [&](int begin, int end) {
    for (int p = begin; p < end; ++p) {
      const T* src = x.data() + static_cast<std::size_t>(p) * x.shape().plane();
      T* dst = out.data() + static_cast<std::size_t>(p) * out_h * out_w;
      for (int oy = 0; oy < out_h; ++oy) {
        const T* r0 = src + static_cast<std::size_t>(ty[oy].i0) * x.w();
        const T* r1 = src + static_cast<std::size_t>(ty[oy].i1) * x.w();
        const T wy = static_cast<T>(ty[oy].w1);
        for (int ox = 0; ox < out_w; ++ox) {
          const LinearTap& t = tx[ox];
          const T wx = static_cast<T>(t.w1);
          const T top = std::lerp(r0[t.i0], r0[t.i1], wx);
          const T bot = std::lerp(r1[t.i0], r1[t.i1], wx);
          dst[static_cast<std::size_t>(oy) * out_w + ox] = std::lerp(top, bot, wy);
        }
      }
    }
  });
  return out;
}

template <typename T>
Tensor4<T> resize_nearest(const Tensor4<T>& x, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) {
    throw ShapeError("resize_nearest: target size must be >= 1");
  }
  auto source = [](int in, int out) {
    std::vector<int> idx(out);
    const double scale = static_cast<double>(in) / out;
    for (int o = 0; o < out; ++o) {
      idx[o] = std::min(static_cast<int>(std::floor((o + 0.5) * scale)), in - 1);
    }
    return idx;
  };
  const auto sy = source(x.h(), out_h);
  const auto sx = source(x.w(), out_w);
  Tensor4<T> out(Shape4{x.n(), x.c(), out_h, out_w});
  for (int b = 0; b < x.n(); ++b)
    for (int ch = 0; ch < x.c(); ++ch)
      for (int y = 0; y < out_h; ++y)
        for (int xx = 0; xx < out_w; ++xx) out(b, ch, y, xx) = x(b, ch, sy[y], sx[xx]);
  return out;
}

template <typename T>
Tensor4<T> flip_horizontal(const Tensor4<T>& x) {
  Tensor4<T> out(x.shape());
  for (int b = 0; b < x.n(); ++b)
    for (int ch = 0; ch < x.c(); ++ch)
      for (int y = 0; y < x.h(); ++y)
        for (int xx = 0; xx < x.w(); ++xx) out(b, ch, y, xx) = x(b, ch, y, x.w() - 1 - xx);
  return out;
}

#define MINET_INSTANTIATE(T)                                                   \
  template class Tensor4<T>;                                                   \
  template Tensor4<T> ewise_add(const Tensor4<T>&, const Tensor4<T>&);         \
  template Tensor4<T> concat_channels(std::span<const Tensor4<T>>);            \
  template Tensor4<T> slice_channels(const Tensor4<T>&, int, int);             \
  template Tensor4<T> resize_bilinear(const Tensor4<T>&, int, int);            \
  template Tensor4<T> resize_nearest(const Tensor4<T>&, int, int);             \
  template Tensor4<T> flip_horizontal(const Tensor4<T>&);

MINET_INSTANTIATE(float)
MINET_INSTANTIATE(double)
template class Tensor4<unsigned char>;

}  // namespace minet
