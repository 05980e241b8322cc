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

#include "minet/autodiff/param_store.hpp"

#include <stdexcept>

namespace minet::ad {

template <typename T>
ParamStore<T>::ParamStore(const ParamStore& other) {
  for (const auto& p : other.items_) add(p->name, p->value).grad = p->grad;
}

template <typename T>
ParamStore<T>& ParamStore<T>::operator=(const ParamStore& other) {
  if (this != &other) {
    ParamStore copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
Parameter<T>& ParamStore<T>::add(std::string name, Tensor4<T> value) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  index_.emplace(name, items_.size());
  Tensor4<T> grad(value.shape(), T(0));
  items_.push_back(std::make_unique<Parameter<T>>(
      Parameter<T>{std::move(name), std::move(value), std::move(grad)}));
  return *items_.back();
}

template <typename T>
bool ParamStore<T>::contains(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

template <typename T>
Parameter<T>& ParamStore<T>::get(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + std::string(name));
  return *items_[it->second];
}

template <typename T>
const Parameter<T>& ParamStore<T>::get(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + std::string(name));
  return *items_[it->second];
}

template <typename T>
std::size_t ParamStore<T>::element_count() const {
  std::size_t n = 0;
  for (const auto& p : items_) n += p->value.size();
  return n;
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& p : items_) p->grad.fill(T(0));
}

template class ParamStore<float>;
template class ParamStore<double>;

}  // namespace minet::ad
