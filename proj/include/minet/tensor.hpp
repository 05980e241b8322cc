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

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace minet {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Shape4 {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  std::size_t count() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  bool operator==(const Shape4&) const = default;
  std::string str() const;
};

/// Dense rank-4 array in (n, c, h, w) row-major order.
///
/// Element (b, ch, y, x) lives at ((b*c + ch)*h + y)*w + x. A
/// default-constructed tensor is empty and only valid as a placeholder;
/// every constructed tensor has all dimensions >= 1.
template <typename T>
class Tensor4 {
 public:
  using value_type = T;

  Tensor4() = default;
  explicit Tensor4(Shape4 shape, T fill = T(0));
  Tensor4(Shape4 shape, std::vector<T> data);

  static Tensor4 zeros(Shape4 s) { return Tensor4(s, T(0)); }
  static Tensor4 ones(Shape4 s) { return Tensor4(s, T(1)); }
  static Tensor4 full(Shape4 s, T v) { return Tensor4(s, v); }

  const Shape4& shape() const { return shape_; }
  int n() const { return shape_.n; }
  int c() const { return shape_.c; }
  int h() const { return shape_.h; }
  int w() const { return shape_.w; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  const std::vector<T>& vec() const { return data_; }

  std::size_t index(int b, int ch, int y, int x) const {
    return ((static_cast<std::size_t>(b) * shape_.c + ch) * shape_.h + y) *
               shape_.w +
           x;
  }
  T& operator()(int b, int ch, int y, int x) { return data_[index(b, ch, y, x)]; }
  const T& operator()(int b, int ch, int y, int x) const {
    return data_[index(b, ch, y, x)];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  /// Pointer to the start of plane (b, ch).
  T* plane(int b, int ch) { return data_.data() + index(b, ch, 0, 0); }
  const T* plane(int b, int ch) const { return data_.data() + index(b, ch, 0, 0); }

  void fill(T v);

  template <typename U>
  Tensor4<U> cast() const {
    return Tensor4<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
  }

 private:
  Shape4 shape_{0, 0, 0, 0};
  std::vector<T> data_;
};

void check_shape(const Shape4& s);

template <typename T>
Tensor4<T> ewise_add(const Tensor4<T>& a, const Tensor4<T>& b);

/// Channel concatenation; every part must share n, h and w.
template <typename T>
Tensor4<T> concat_channels(std::span<const Tensor4<T>> parts);

/// Copies channels [begin, begin + count).
template <typename T>
Tensor4<T> slice_channels(const Tensor4<T>& x, int begin, int count);

/// Bilinear resampling with half-pixel centers (align_corners = false).
template <typename T>
Tensor4<T> resize_bilinear(const Tensor4<T>& x, int out_h, int out_w);

/// Nearest-neighbour resampling with the same half-pixel source mapping.
template <typename T>
Tensor4<T> resize_nearest(const Tensor4<T>& x, int out_h, int out_w);

/// Horizontal mirror of every plane.
template <typename T>
Tensor4<T> flip_horizontal(const Tensor4<T>& x);

/// Source taps for one output coordinate of a half-pixel bilinear resize.
struct LinearTap {
  int i0 = 0;
  int i1 = 0;
  double w1 = 0.0;  // weight of i1; i0 gets 1 - w1
};

std::vector<LinearTap> bilinear_taps(int in_size, int out_size);

}  // namespace minet
