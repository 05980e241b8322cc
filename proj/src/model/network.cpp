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


#include <algorithm>

#include "json.hpp"
#include "minet/autodiff/optim.hpp"
#include "minet/model.hpp"

namespace minet {

using nlohmann::json;

std::string_view layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Conv: return "conv";
    case LayerKind::BatchNorm: return "batchnorm";
    case LayerKind::ReLU: return "relu";
    case LayerKind::Add: return "add";
    case LayerKind::Resize: return "resize";
    case LayerKind::Sigmoid: return "sigmoid";
  }
  return "conv";
}

void MINetConfig::validate() const {
  if (input_channels < 1) throw std::invalid_argument("input_channels must be >= 1");
  for (int w : stage_widths) {
    if (w < 1) throw std::invalid_argument("stage widths must be >= 1");
  }
  for (int m : mi_counts) {
    if (m < 0) throw std::invalid_argument("MI counts must be >= 0");
  }
  if (input_size < kMinInputSize || train_size < kMinInputSize) {
    throw std::invalid_argument("input_size and train_size must be >= " +
                                std::to_string(kMinInputSize));
  }
}

std::array<int, 5> MINetConfig::decoder_widths() const {
  return {stage_widths[0], stage_widths[0], stage_widths[1], stage_widths[2], stage_widths[3]};
}

std::string MINetConfig::to_json() const {
  json j;
  j["input_channels"] = input_channels;
  j["stage_widths"] = stage_widths;
  j["mi_counts"] = mi_counts;
  j["variant"] = std::string(variant_name(variant));
  j["input_size"] = input_size;
  j["train_size"] = train_size;
  return j.dump();
}

MINetConfig MINetConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("network config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("network config must be a JSON object");
  MINetConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "input_channels") c.input_channels = value.get<int>();
      else if (key == "stage_widths") c.stage_widths = value.get<std::array<int, 5>>();
      else if (key == "mi_counts") c.mi_counts = value.get<std::array<int, 4>>();
      else if (key == "variant") c.variant = parse_variant(value.get<std::string>());
      else if (key == "input_size") c.input_size = value.get<int>();
      else if (key == "train_size") c.train_size = value.get<int>();
      else throw std::invalid_argument("network config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("network config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

template <typename T>
void add_conv(ad::ParamStore<T>& store, const std::string& name, const ConvSpec& spec,
              Rng& rng) {
  auto w = ad::xavier_init<T>(spec, rng);
  store.add(name + ".weight", std::move(w.kernels));
  if (spec.bias) {
    store.add(name + ".bias", Tensor4<T>(Shape4{spec.c_out, 1, 1, 1}, T(0)));
  }
}

template <typename T>
void add_bn(ad::ParamStore<T>& params, ad::ParamStore<T>& buffers, const std::string& name,
            int c) {
  const Shape4 s{c, 1, 1, 1};
  params.add(name + ".gamma", Tensor4<T>(s, T(1)));
  params.add(name + ".beta", Tensor4<T>(s, T(0)));
  buffers.add(name + ".running_mean", Tensor4<T>(s, T(0)));
  buffers.add(name + ".running_var", Tensor4<T>(s, T(1)));
}

template <typename T>
void add_dsconv(ad::ParamStore<T>& params, ad::ParamStore<T>& buffers, const std::string& name,
                int c_in, int c_out, int stride, int dilation, Rng& rng) {
  add_conv(params, name + ".dw", ConvSpec::depthwise(c_in, 3, stride, dilation, dilation), rng);
  add_bn(params, buffers, name + ".dw_bn", c_in);
  add_conv(params, name + ".pw", ConvSpec::pointwise(c_in, c_out), rng);
  add_bn(params, buffers, name + ".pw_bn", c_out);
}

constexpr double kHeadDropout = 0.1;

std::string stage_name(int s) { return "stage" + std::to_string(s); }
std::string decoder_name(int i) { return "decoder" + std::to_string(i); }
std::string head_name(int i) { return "head" + std::to_string(i); }

ConvSpec stage1_spec(const MINetConfig& c) {
  return ConvSpec::dense(c.input_channels, c.stage_widths[0], 3, 2, 1);
}

ConvSpec head_spec(int c) { return ConvSpec::pointwise(c, 1, 1, true); }

}  // namespace

template <typename T>
Network<T>::Network(MINetConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  Rng rng(seed);
  const auto& cw = config_.stage_widths;
  add_conv(params_, "stage1.conv", stage1_spec(config_), rng);
  add_bn(params_, buffers_, "stage1.bn", cw[0]);
  for (int s = 2; s <= 5; ++s) {
    add_dsconv(params_, buffers_, stage_name(s) + ".down", cw[s - 2], cw[s - 1], 2, 1, rng);
    for (int j = 1; j <= config_.mi_counts[s - 2]; ++j) {
      mi_modules_.emplace_back(stage_name(s) + ".mi" + std::to_string(j), cw[s - 1],
                               config_.variant);
      mi_modules_.back().register_params(params_, rng);
    }
  }
  const auto dw = config_.decoder_widths();
  for (int i = 5; i >= 1; --i) {
    add_dsconv(params_, buffers_, decoder_name(i) + ".ds1", cw[i - 1], cw[i - 1], 1, 2, rng);
    add_dsconv(params_, buffers_, decoder_name(i) + ".ds2", cw[i - 1], dw[i - 1], 1, 1, rng);
  }
  for (int i = 1; i <= 5; ++i) add_conv(params_, head_name(i) + ".conv", head_spec(dw[i - 1]), rng);
}

template <typename T>
void Network<T>::check_input(const Tensor4<T>& x) const {
  if (x.n() < 1 || x.c() != config_.input_channels) {
    throw ShapeError("network expects (n," + std::to_string(config_.input_channels) +
                     ",h,w) input, got " + x.shape().str());
  }
  if (x.h() < kMinInputSize || x.w() < kMinInputSize) {
    throw ShapeError("input " + x.shape().str() + " is smaller than " +
                     std::to_string(kMinInputSize) + "x" + std::to_string(kMinInputSize));
  }
}

template <typename T>
ad::Var<T> Network<T>::conv(ad::Tape<T>& tape, const ad::Var<T>& x, const std::string& name,
                            const ConvSpec& spec) {
  ad::Var<T> bias;
  if (spec.bias) bias = tape.parameter(params_.get(name + ".bias"));
  return ad::conv2d(tape, x, tape.parameter(params_.get(name + ".weight")), bias, spec);
}

template <typename T>
ad::Var<T> Network<T>::bn_relu(ad::Tape<T>& tape, const ad::Var<T>& x, const std::string& name,
                               Mode mode) {
  auto y = ad::batchnorm(tape, x, tape.parameter(params_.get(name + ".gamma")),
                         tape.parameter(params_.get(name + ".beta")),
                         buffers_.get(name + ".running_mean").value,
                         buffers_.get(name + ".running_var").value, mode);
  return ad::relu(tape, y);
}

template <typename T>
ad::Var<T> Network<T>::dsconv(ad::Tape<T>& tape, const ad::Var<T>& x, const std::string& name,
                              int c_in, int c_out, int stride, int dilation, Mode mode) {
  auto y = conv(tape, x, name + ".dw", ConvSpec::depthwise(c_in, 3, stride, dilation, dilation));
  y = bn_relu(tape, y, name + ".dw_bn", mode);
  y = conv(tape, y, name + ".pw", ConvSpec::pointwise(c_in, c_out));
  return bn_relu(tape, y, name + ".pw_bn", mode);
}

template <typename T>
typename Network<T>::Outputs Network<T>::backbone(ad::Tape<T>& tape, const ad::Var<T>& x,
                                                  Mode mode) {
  check_input(x->value);
  const auto& cw = config_.stage_widths;
  Outputs f;
  f[0] = bn_relu(tape, conv(tape, x, "stage1.conv", stage1_spec(config_)), "stage1.bn", mode);
  std::size_t mi = 0;
  for (int s = 2; s <= 5; ++s) {
    auto y = dsconv(tape, f[s - 2], stage_name(s) + ".down", cw[s - 2], cw[s - 1], 2, 1, mode);
    for (int j = 0; j < config_.mi_counts[s - 2]; ++j) {
      y = mi_modules_[mi++].forward(tape, y, params_);
    }
    f[s - 1] = y;
  }
  return f;
}

template <typename T>
typename Network<T>::Outputs Network<T>::forward(ad::Tape<T>& tape, const ad::Var<T>& x,
                                                 Mode mode, Rng* dropout_rng) {
  if (mode == Mode::Train && dropout_rng == nullptr) {
    throw std::invalid_argument("training forward needs a dropout RNG");
  }
  const Outputs f = backbone(tape, x, mode);
  const auto& cw = config_.stage_widths;
  const auto dw = config_.decoder_widths();
  const int H = x->value.h(), W = x->value.w();
  Outputs d;
  for (int i = 5; i >= 1; --i) {
    ad::Var<T> in = f[i - 1];
    if (i < 5) {
      in = ad::add(tape, in,
                   ad::resize_bilinear(tape, d[i], in->value.h(), in->value.w()));
    }
    auto y = dsconv(tape, in, decoder_name(i) + ".ds1", cw[i - 1], cw[i - 1], 1, 2, mode);
    d[i - 1] = dsconv(tape, y, decoder_name(i) + ".ds2", cw[i - 1], dw[i - 1], 1, 1, mode);
  }
  Outputs s;
  for (int i = 1; i <= 5; ++i) {
    ad::Var<T> y = d[i - 1];
    if (mode == Mode::Train) y = ad::dropout(tape, y, kHeadDropout, *dropout_rng, mode);
    y = ad::sigmoid(tape, conv(tape, y, head_name(i) + ".conv", head_spec(dw[i - 1])));
    s[i - 1] = ad::resize_bilinear(tape, y, H, W);
  }
  return s;
}

template <typename T>
std::array<Tensor4<T>, 5> Network<T>::predict(const Tensor4<T>& x) {
  ad::Tape<T> tape(false);
  auto out = forward(tape, tape.constant(x), Mode::Infer);
  std::array<Tensor4<T>, 5> maps;
  for (std::size_t i = 0; i < 5; ++i) maps[i] = std::move(out[i]->value);
  return maps;
}

template <typename T>
std::vector<LayerInfo> Network<T>::describe(int h, int w) const {
  if (h < kMinInputSize || w < kMinInputSize) {
    throw ShapeError("describe: input smaller than " + std::to_string(kMinInputSize));
  }
  std::vector<LayerInfo> rows;
  auto plane = [](int a, int b) { return static_cast<std::uint64_t>(a) * b; };
  auto conv_row = [&](const std::string& name, const ConvSpec& spec, int ih, int iw) {
    LayerInfo r;
    r.name = name;
    r.kind = LayerKind::Conv;
    r.spec = spec;
    r.channels = spec.c_out;
    r.out_h = spec.out_size(ih);
    r.out_w = spec.out_size(iw);
    r.params = spec.param_count();
    r.macs = spec.macs(r.out_h, r.out_w);
    r.elements = spec.c_out * plane(r.out_h, r.out_w);
    rows.push_back(r);
  };
  auto simple = [&](const std::string& name, LayerKind kind, int c, int oh, int ow,
                    std::size_t params = 0) {
    rows.push_back({name, kind, {}, c, oh, ow, params, 0, c * plane(oh, ow)});
  };
  auto bn_relu_rows = [&](const std::string& name, int c, int oh, int ow) {
    simple(name, LayerKind::BatchNorm, c, oh, ow, 2 * static_cast<std::size_t>(c));
    simple(name + ".relu", LayerKind::ReLU, c, oh, ow);
  };
  auto ds_rows = [&](const std::string& name, int c_in, int c_out, int stride, int dil,
                     int& ih, int& iw) {
    const ConvSpec dws = ConvSpec::depthwise(c_in, 3, stride, dil, dil);
    conv_row(name + ".dw", dws, ih, iw);
    ih = dws.out_size(ih);
    iw = dws.out_size(iw);
    bn_relu_rows(name + ".dw_bn", c_in, ih, iw);
    conv_row(name + ".pw", ConvSpec::pointwise(c_in, c_out), ih, iw);
    bn_relu_rows(name + ".pw_bn", c_out, ih, iw);
  };

  const auto& cw = config_.stage_widths;
  const auto dw = config_.decoder_widths();
  std::array<std::pair<int, int>, 5> dims;
  const ConvSpec s1 = stage1_spec(config_);
  conv_row("stage1.conv", s1, h, w);
  int ch = s1.out_size(h), cwid = s1.out_size(w);
  bn_relu_rows("stage1.bn", cw[0], ch, cwid);
  dims[0] = {ch, cwid};
  std::size_t mi = 0;
  for (int s = 2; s <= 5; ++s) {
    ds_rows(stage_name(s) + ".down", cw[s - 2], cw[s - 1], 2, 1, ch, cwid);
    for (int j = 0; j < config_.mi_counts[s - 2]; ++j) mi_modules_[mi++].describe(ch, cwid, rows);
    dims[s - 1] = {ch, cwid};
  }
  for (int i = 5; i >= 1; --i) {
    auto [fh, fw] = dims[i - 1];
    if (i < 5) {
      simple(decoder_name(i) + ".upsample", LayerKind::Resize, cw[i - 1], fh, fw);
      simple(decoder_name(i) + ".skip", LayerKind::Add, cw[i - 1], fh, fw);
    }
    ds_rows(decoder_name(i) + ".ds1", cw[i - 1], cw[i - 1], 1, 2, fh, fw);
    ds_rows(decoder_name(i) + ".ds2", cw[i - 1], dw[i - 1], 1, 1, fh, fw);
  }
  for (int i = 1; i <= 5; ++i) {
    auto [fh, fw] = dims[i - 1];
    conv_row(head_name(i) + ".conv", head_spec(dw[i - 1]), fh, fw);
    simple(head_name(i) + ".sigmoid", LayerKind::Sigmoid, 1, fh, fw);
    simple(head_name(i) + ".upsample", LayerKind::Resize, 1, h, w);
  }
  return rows;
}

template class Network<float>;
template class Network<double>;

}  // namespace minet
