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

#include "minet/autodiff/ops.hpp"

#include <cstring>
#include <string>

#include "minet/autodiff/grad_kernels.hpp"

namespace minet::ad {

namespace {

template <typename T>
bool wants(const Var<T>& v) {
  return v && v->requires_grad;
}

template <typename T>
std::span<const T> flat(const Var<T>& v) {
  return v->value.values();
}

}  // namespace

template <typename T>
Var<T> add(Tape<T>& tape, const Var<T>& a, const Var<T>& b) {
  return tape.record(ewise_add(a->value, b->value), {a, b}, [](Node<T>& self) {
    for (auto& in : self.inputs)
      if (wants(in)) in->accumulate(self.grad);
  });
}

template <typename T>
Var<T> concat(Tape<T>& tape, const std::vector<Var<T>>& parts) {
  std::vector<Tensor4<T>> values;
  values.reserve(parts.size());
  for (const auto& p : parts) values.push_back(p->value);
  return tape.record(concat_channels<T>(values), parts, [](Node<T>& self) {
    int offset = 0;
    for (auto& in : self.inputs) {
      const int c = in->value.c();
      if (wants(in)) in->accumulate(slice_channels(self.grad, offset, c));
      offset += c;
    }
  });
}

template <typename T>
Var<T> gather_channels(Tape<T>& tape, const Var<T>& x, std::vector<int> source) {
  const Tensor4<T>& v = x->value;
  for (int s : source) {
    if (s < 0 || s >= v.c()) throw ShapeError("gather_channels: source channel out of range");
  }
  const int C = static_cast<int>(source.size());
  Tensor4<T> out(Shape4{v.n(), C, v.h(), v.w()});
  const std::size_t plane = v.shape().plane();
  for (int b = 0; b < v.n(); ++b)
    for (int ch = 0; ch < C; ++ch)
      std::memcpy(out.plane(b, ch), v.plane(b, source[ch]), sizeof(T) * plane);
  return tape.record(std::move(out), {x}, [source = std::move(source)](Node<T>& self) {
    const auto& in = self.inputs[0];
    Tensor4<T> g(in->value.shape(), T(0));
    const std::size_t plane = g.shape().plane();
    for (int b = 0; b < g.n(); ++b)
      for (std::size_t ch = 0; ch < source.size(); ++ch) {
        const T* src = self.grad.plane(b, static_cast<int>(ch));
        T* dst = g.plane(b, source[ch]);
        for (std::size_t i = 0; i < plane; ++i) dst[i] += src[i];
      }
    in->accumulate(g);
  });
}

template <typename T>
Var<T> conv2d(Tape<T>& tape, const Var<T>& x, const Var<T>& weight, const Var<T>& bias,
              const ConvSpec& spec) {
  if (weight->value.shape() != spec.weight_shape()) {
    throw ShapeError("conv2d: weight " + weight->value.shape().str() + " does not match spec " +
                     spec.weight_shape().str());
  }
  std::string tag;
  if (weight->param) {
    tag = weight->param->name;
    const std::string suffix = ".weight";
    if (tag.size() > suffix.size() &&
        tag.compare(tag.size() - suffix.size(), suffix.size(), suffix) == 0) {
      tag.resize(tag.size() - suffix.size());
    }
  }
  std::span<const T> b;
  if (bias) b = flat(bias);
  Tensor4<T> out = minet::conv2d<T>(x->value, spec, flat(weight), b, tag);
  std::vector<Var<T>> inputs{x, weight};
  if (bias) inputs.push_back(bias);
  return tape.record(std::move(out), std::move(inputs), [spec](Node<T>& self) {
    const auto& in = self.inputs[0];
    const auto& w = self.inputs[1];
    if (wants(in)) {
      in->accumulate(conv2d_backward_input<T>(self.grad, spec, w->value.values(),
                                              in->value.shape()));
    }
    if (wants(w)) w->accumulate(conv2d_backward_weight<T>(self.grad, in->value, spec));
    if (self.inputs.size() > 2 && wants(self.inputs[2])) {
      const auto gb = conv2d_backward_bias<T>(self.grad);
      self.inputs[2]->accumulate(Tensor4<T>(self.inputs[2]->value.shape(), gb));
    }
  });
}

template <typename T>
Var<T> batchnorm(Tape<T>& tape, const Var<T>& x, const Var<T>& gamma, const Var<T>& beta,
                 Tensor4<T>& running_mean, Tensor4<T>& running_var, Mode mode, double eps,
                 double momentum) {
  const Tensor4<T>& v = x->value;
  const std::size_t C = static_cast<std::size_t>(v.c());
  if (gamma->value.size() != C || beta->value.size() != C || running_mean.size() != C ||
      running_var.size() != C) {
    throw ShapeError("batchnorm: parameters do not match " + std::to_string(C) + " channels");
  }
  std::vector<T> mean, var;
  if (mode == Mode::Train) {
    BatchStats<T> st = batch_statistics(v);
    const double m = static_cast<double>(v.n()) * v.shape().plane();
    const T mom = static_cast<T>(momentum);
    for (std::size_t ch = 0; ch < C; ++ch) {
      const T unbiased = m > 1 ? static_cast<T>(st.var[ch] * (m / (m - 1))) : st.var[ch];
      running_mean[ch] = (T(1) - mom) * running_mean[ch] + mom * st.mean[ch];
      running_var[ch] = (T(1) - mom) * running_var[ch] + mom * unbiased;
    }
    mean = std::move(st.mean);
    var = std::move(st.var);
  } else {
    mean.assign(running_mean.values().begin(), running_mean.values().end());
    var.assign(running_var.values().begin(), running_var.values().end());
  }
  Tensor4<T> out = batchnorm_apply<T>(v, flat(gamma), flat(beta), mean, var, eps);
  return tape.record(
      std::move(out), {x, gamma, beta},
      [mode, eps, mean = std::move(mean), var = std::move(var)](Node<T>& self) {
        const auto& in = self.inputs[0];
        const auto& g = self.inputs[1];
        const auto& bt = self.inputs[2];
        BatchNormGrads<T> grads =
            mode == Mode::Train
                ? batchnorm_backward_train<T>(self.grad, in->value, g->value.values(), mean,
                                              var, eps)
                : batchnorm_backward_infer<T>(self.grad, in->value, g->value.values(), mean,
                                              var, eps);
        if (wants(in)) in->accumulate(grads.input);
        if (wants(g)) g->accumulate(Tensor4<T>(g->value.shape(), grads.gamma));
        if (wants(bt)) bt->accumulate(Tensor4<T>(bt->value.shape(), grads.beta));
      });
}

template <typename T>
Var<T> relu(Tape<T>& tape, const Var<T>& x) {
  return tape.record(activate(x->value, Activation::ReLU), {x}, [](Node<T>& self) {
    const auto& in = self.inputs[0];
    Tensor4<T> g(in->value.shape());
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = in->value[i] > T(0) ? self.grad[i] : T(0);
    }
    in->accumulate(g);
  });
}

template <typename T>
Var<T> sigmoid(Tape<T>& tape, const Var<T>& x) {
  return tape.record(activate(x->value, Activation::Sigmoid), {x}, [](Node<T>& self) {
    const auto& in = self.inputs[0];
    Tensor4<T> g(in->value.shape());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const T y = self.value[i];
      g[i] = self.grad[i] * y * (T(1) - y);
    }
    in->accumulate(g);
  });
}

template <typename T>
Var<T> resize_bilinear(Tape<T>& tape, const Var<T>& x, int out_h, int out_w) {
  return tape.record(minet::resize_bilinear(x->value, out_h, out_w), {x}, [](Node<T>& self) {
    const auto& in = self.inputs[0];
    in->accumulate(resize_bilinear_backward<T>(self.grad, in->value.h(), in->value.w()));
  });
}

template <typename T>
Var<T> dropout(Tape<T>& tape, const Var<T>& x, double rate, Rng& rng, Mode mode) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  if (mode == Mode::Infer || rate == 0.0) return x;
  return mul_constant(tape, x, dropout_mask<T>(x->value.shape(), rate, rng));
}

template <typename T>
Var<T> mul_constant(Tape<T>& tape, const Var<T>& x, Tensor4<T> factor) {
  if (factor.shape() != x->value.shape()) {
    throw ShapeError("mul_constant: shape mismatch " + factor.shape().str() + " vs " +
                     x->value.shape().str());
  }
  Tensor4<T> out(x->value.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x->value[i] * factor[i];
  return tape.record(std::move(out), {x}, [factor = std::move(factor)](Node<T>& self) {
    Tensor4<T> g(self.grad.shape());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = self.grad[i] * factor[i];
    self.inputs[0]->accumulate(g);
  });
}

template <typename T>
Var<T> scale(Tape<T>& tape, const Var<T>& x, T factor) {
  Tensor4<T> out(x->value.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x->value[i] * factor;
  return tape.record(std::move(out), {x}, [factor](Node<T>& self) {
    Tensor4<T> g(self.grad.shape());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = self.grad[i] * factor;
    self.inputs[0]->accumulate(g);
  });
}

template <typename T>
Var<T> sum(Tape<T>& tape, const Var<T>& x) {
  T s = 0;
  for (T v : x->value.values()) s += v;
  return tape.record(Tensor4<T>(Shape4{}, s), {x}, [](Node<T>& self) {
    self.inputs[0]->accumulate(Tensor4<T>(self.inputs[0]->value.shape(), self.grad[0]));
  });
}

template <typename T>
Var<T> dot(Tape<T>& tape, const Var<T>& x, const Tensor4<T>& weights) {
  if (weights.shape() != x->value.shape()) {
    throw ShapeError("dot: shape mismatch " + weights.shape().str() + " vs " +
                     x->value.shape().str());
  }
  T s = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += x->value[i] * weights[i];
  return tape.record(Tensor4<T>(Shape4{}, s), {x}, [weights](Node<T>& self) {
    Tensor4<T> g(weights.shape());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = weights[i] * self.grad[0];
    self.inputs[0]->accumulate(g);
  });
}

#define MINET_INSTANTIATE(T)                                                               \
  template Var<T> add(Tape<T>&, const Var<T>&, const Var<T>&);                             \
  template Var<T> concat(Tape<T>&, const std::vector<Var<T>>&);                            \
  template Var<T> gather_channels(Tape<T>&, const Var<T>&, std::vector<int>);              \
  template Var<T> conv2d(Tape<T>&, const Var<T>&, const Var<T>&, const Var<T>&,            \
                         const ConvSpec&);                                                 \
  template Var<T> batchnorm(Tape<T>&, const Var<T>&, const Var<T>&, const Var<T>&,         \
                            Tensor4<T>&, Tensor4<T>&, Mode, double, double);               \
  template Var<T> relu(Tape<T>&, const Var<T>&);                                           \
  template Var<T> sigmoid(Tape<T>&, const Var<T>&);                                        \
  template Var<T> resize_bilinear(Tape<T>&, const Var<T>&, int, int);                      \
  template Var<T> dropout(Tape<T>&, const Var<T>&, double, Rng&, Mode);                    \
  template Var<T> mul_constant(Tape<T>&, const Var<T>&, Tensor4<T>);                       \
  template Var<T> scale(Tape<T>&, const Var<T>&, T);                                       \
  template Var<T> sum(Tape<T>&, const Var<T>&);                                            \
  template Var<T> dot(Tape<T>&, const Var<T>&, const Tensor4<T>&);

MINET_INSTANTIATE(float)
MINET_INSTANTIATE(double)

}  // namespace minet::ad
