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

#include "minet/autodiff/tape.hpp"

#include <algorithm>

namespace minet::ad {

template <typename T>
void Node<T>::accumulate(const Tensor4<T>& g) {
  if (g.shape() != value.shape()) {
    throw ShapeError("gradient shape " + g.shape().str() + " does not match value " +
                     value.shape().str());
  }
  if (grad.empty()) {
    grad = g;
    return;
  }
  T* dst = grad.data();
  const T* src = g.data();
  for (std::size_t i = 0; i < grad.size(); ++i) dst[i] += src[i];
}

template <typename T>
Var<T> Tape<T>::constant(Tensor4<T> value) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  if (recording_) nodes_.push_back(node);
  return node;
}

template <typename T>
Var<T> Tape<T>::variable(Tensor4<T> value) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  node->requires_grad = true;
  if (recording_) nodes_.push_back(node);
  return node;
}

template <typename T>
Var<T> Tape<T>::parameter(Parameter<T>& p) {
  auto node = std::make_shared<Node<T>>();
  node->value = p.value;
  node->requires_grad = true;
  node->param = &p;
  if (recording_) nodes_.push_back(node);
  return node;
}

template <typename T>
Var<T> Tape<T>::record(Tensor4<T> value, std::vector<Var<T>> inputs, BackwardFn fn) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  if (!recording_) return node;
  node->requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                    [](const Var<T>& v) { return v && v->requires_grad; });
  if (node->requires_grad) {
    node->inputs = std::move(inputs);
    node->backward = std::move(fn);
  }
  nodes_.push_back(node);
  return node;
}

template <typename T>
void Tape<T>::backward(const Var<T>& loss, T seed) {
  if (!recording_) throw AutodiffError("backward on a non-recording tape");
  if (!loss) throw AutodiffError("backward on a null loss");
  auto it = std::find(nodes_.begin(), nodes_.end(), loss);
  if (it == nodes_.end()) {
    throw AutodiffError("backward without a recorded forward pass for this loss");
  }
  if (loss->value.size() != 1) {
    throw AutodiffError("backward requires a scalar loss, got shape " +
                        loss->value.shape().str());
  }
  loss->grad = Tensor4<T>(loss->value.shape(), seed);
  for (auto rit = std::make_reverse_iterator(it + 1); rit != nodes_.rend(); ++rit) {
    Node<T>& node = **rit;
    if (node.grad.empty() || !node.requires_grad) continue;
    if (node.backward) node.backward(node);
    if (node.param) {
      T* dst = node.param->grad.data();
      const T* src = node.grad.data();
      for (std::size_t i = 0; i < node.grad.size(); ++i) dst[i] += src[i];
    }
  }
  for (auto& n : nodes_) {
    n->backward = nullptr;
    n->inputs.clear();
  }
  nodes_.clear();
}

template struct Node<float>;
template struct Node<double>;
template class Tape<float>;
template class Tape<double>;

}  // namespace minet::ad
