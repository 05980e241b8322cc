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

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "minet/autodiff/param_store.hpp"
#include "minet/tensor.hpp"

namespace minet::ad {

class AutodiffError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <typename T>
struct Node {
  Tensor4<T> value;
  Tensor4<T> grad;  // allocated on first accumulation
  bool requires_grad = false;
  Parameter<T>* param = nullptr;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  /// Gradient buffer, zero-initialized on first use.
  Tensor4<T>& grad_buffer() {
    if (grad.empty()) grad = Tensor4<T>(value.shape(), T(0));
    return grad;
  }
  void accumulate(const Tensor4<T>& g);
};

template <typename T>
using Var = std::shared_ptr<Node<T>>;

/// Records a forward pass so that backward() can replay it in reverse.
///
/// A non-recording tape evaluates the same ops without keeping any history,
/// which is what inference and finite-difference probes use.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Node<T>&)>;

  explicit Tape(bool recording = true) : recording_(recording) {}

  bool recording() const { return recording_; }

  Var<T> constant(Tensor4<T> value);
  /// Free leaf that collects a gradient (read it from the node after backward).
  Var<T> variable(Tensor4<T> value);
  /// Leaf bound to a stored parameter; backward accumulates into p.grad.
  Var<T> parameter(Parameter<T>& p);

  /// Registers an op output. fn is only kept when some input needs a gradient.
  Var<T> record(Tensor4<T> value, std::vector<Var<T>> inputs, BackwardFn fn);

  /// Seeds d(loss)/d(loss) = seed and propagates to every leaf. The loss
  /// must be a single element produced on this tape. Consumes the history.
  void backward(const Var<T>& loss, T seed = T(1));

  std::size_t size() const { return nodes_.size(); }

 private:
  bool recording_;
  std::vector<Var<T>> nodes_;
};

}  // namespace minet::ad
