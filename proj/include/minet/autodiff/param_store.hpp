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

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "minet/tensor.hpp"

namespace minet::ad {

template <typename T>
struct Parameter {
  std::string name;
  Tensor4<T> value;
  Tensor4<T> grad;  // same shape as value
};

/// Named parameters in insertion order. Addresses are stable for the
/// lifetime of the store; gradients are never zeroed implicitly.
template <typename T>
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore& other);
  ParamStore& operator=(const ParamStore& other);
  ParamStore(ParamStore&&) noexcept = default;
  ParamStore& operator=(ParamStore&&) noexcept = default;

  Parameter<T>& add(std::string name, Tensor4<T> value);

  bool contains(std::string_view name) const;
  Parameter<T>& get(std::string_view name);
  const Parameter<T>& get(std::string_view name) const;

  std::size_t size() const { return items_.size(); }
  Parameter<T>& at(std::size_t i) { return *items_[i]; }
  const Parameter<T>& at(std::size_t i) const { return *items_[i]; }

  /// Sum of the element counts of every stored tensor.
  std::size_t element_count() const;
  void zero_grad();

 private:
  std::vector<std::unique_ptr<Parameter<T>>> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace minet::ad
