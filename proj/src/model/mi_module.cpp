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
#include <cctype>

#include "minet/autodiff/optim.hpp"
#include "minet/model.hpp"

namespace minet {

std::string_view variant_name(MIVariant v) {
  switch (v) {
    case MIVariant::Standard: return "standard";
    case MIVariant::UniformDilation: return "uniform_dilation";
    case MIVariant::SumFusion: return "sum_fusion";
    case MIVariant::NoChannelInteraction: return "no_channel_interaction";
    case MIVariant::ConcatDSConv: return "concat_dsconv";
    case MIVariant::SumDSConv: return "sum_dsconv";
  }
  return "standard";
}

MIVariant parse_variant(std::string_view name) {
  for (MIVariant v : all_variants()) {
    if (variant_name(v) == name) return v;
  }
  std::string key;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (key == "ours" || key == "mi") return MIVariant::Standard;
  if (key == "womulti") return MIVariant::UniformDilation;
  if (key == "spw") return MIVariant::SumFusion;
  if (key == "woci") return MIVariant::NoChannelInteraction;
  if (key == "concat") return MIVariant::ConcatDSConv;
  if (key == "sum") return MIVariant::SumDSConv;
  throw std::invalid_argument("unknown MI variant: " + std::string(name));
}

std::vector<MIVariant> all_variants() {
  return {MIVariant::Standard,         MIVariant::UniformDilation, MIVariant::SumFusion,
          MIVariant::NoChannelInteraction, MIVariant::ConcatDSConv, MIVariant::SumDSConv};
}

MIModule::MIModule(std::string prefix, int channels, MIVariant variant)
    : prefix_(std::move(prefix)), channels_(channels), variant_(variant) {
  if (channels < 1) throw std::invalid_argument("MIModule: channels must be >= 1");
}

std::array<int, 4> MIModule::dilations() const {
  if (variant_ == MIVariant::UniformDilation) return {1, 1, 1, 1};
  return {1, 2, 4, 8};
}

std::vector<std::pair<std::string, ConvSpec>> MIModule::convs() const {
  const int c = channels_;
  const auto dil = dilations();
  std::vector<std::pair<std::string, ConvSpec>> out;
  const bool dsconv_branches =
      variant_ == MIVariant::ConcatDSConv || variant_ == MIVariant::SumDSConv;
  for (int i = 0; i < 4; ++i) {
    const ConvSpec dw = ConvSpec::depthwise(c, 3, 1, dil[i], dil[i]);
    if (dsconv_branches) {
      const std::string branch = prefix_ + ".branch" + std::to_string(i + 1);
      out.emplace_back(branch + ".dw", dw);
      out.emplace_back(branch + ".pw", ConvSpec::pointwise(c, c));
    } else {
      out.emplace_back(prefix_ + ".dw" + std::to_string(i + 1), dw);
    }
  }
  switch (variant_) {
    case MIVariant::Standard:
    case MIVariant::UniformDilation:
      out.emplace_back(prefix_ + ".fuse", ConvSpec::pointwise(4 * c, c, c));
      out.emplace_back(prefix_ + ".mix", ConvSpec::pointwise(c, c));
      break;
    case MIVariant::SumFusion:
      out.emplace_back(prefix_ + ".mix", ConvSpec::pointwise(c, c));
      break;
    case MIVariant::NoChannelInteraction:
      out.emplace_back(prefix_ + ".fuse", ConvSpec::pointwise(4 * c, c, c));
      out.emplace_back(prefix_ + ".scale", ConvSpec::pointwise(c, c, c));
      break;
    case MIVariant::ConcatDSConv:
      out.emplace_back(prefix_ + ".reduce", ConvSpec::pointwise(4 * c, c));
      break;
    case MIVariant::SumDSConv:
      break;
  }
  return out;
}

template <typename T>
void MIModule::register_params(ad::ParamStore<T>& store, Rng& rng) const {
  for (const auto& [name, spec] : convs()) {
    store.add(name + ".weight", ad::xavier_init<T>(spec, rng).kernels);
  }
}

template <typename T>
ad::Var<T> MIModule::forward(ad::Tape<T>& tape, const ad::Var<T>& x,
                             ad::ParamStore<T>& store) const {
  if (x->value.c() != channels_) {
    throw ShapeError("MI module " + prefix_ + " expects " + std::to_string(channels_) +
                     " channels, got " + x->value.shape().str());
  }
  const auto specs = convs();
  auto conv = [&](const ad::Var<T>& in, std::size_t i) {
    return ad::conv2d(tape, in, tape.parameter(store.get(specs[i].first + ".weight")),
                      ad::Var<T>{}, specs[i].second);
  };
  auto sum4 = [&](const std::vector<ad::Var<T>>& v) {
    return ad::add(tape, ad::add(tape, ad::add(tape, v[0], v[1]), v[2]), v[3]);
  };

  std::vector<ad::Var<T>> branches;
  ad::Var<T> fused;
  switch (variant_) {
    case MIVariant::Standard:
    case MIVariant::UniformDilation:
    case MIVariant::NoChannelInteraction: {
      for (std::size_t i = 0; i < 4; ++i) branches.push_back(conv(x, i));
      const ad::Var<T> per_index = conv(regroup(tape, branches), 4);
      fused = conv(per_index, 5);
      break;
    }
    case MIVariant::SumFusion: {
      for (std::size_t i = 0; i < 4; ++i) branches.push_back(conv(x, i));
      fused = conv(sum4(branches), 4);
      break;
    }
    case MIVariant::ConcatDSConv:
    case MIVariant::SumDSConv: {
      for (std::size_t i = 0; i < 4; ++i) branches.push_back(conv(conv(x, 2 * i), 2 * i + 1));
      fused = variant_ == MIVariant::ConcatDSConv ? conv(ad::concat(tape, branches), 8)
                                                  : sum4(branches);
      break;
    }
  }
  return ad::relu(tape, ad::add(tape, fused, x));
}

void MIModule::describe(int h, int w, std::vector<LayerInfo>& rows) const {
  const int c = channels_;
  const std::uint64_t plane = static_cast<std::uint64_t>(h) * w;
  for (const auto& [name, spec] : convs()) {
    LayerInfo row;
    row.name = name;
    row.kind = LayerKind::Conv;
    row.spec = spec;
    row.channels = spec.c_out;
    row.out_h = h;
    row.out_w = w;
    row.params = spec.param_count();
    row.macs = spec.macs(h, w);
    row.elements = spec.c_out * plane;
    rows.push_back(row);
  }
  if (variant_ == MIVariant::SumFusion || variant_ == MIVariant::SumDSConv) {
    rows.push_back({prefix_ + ".sum", LayerKind::Add, {}, c, h, w, 0, 0, 3 * c * plane});
  }
  rows.push_back({prefix_ + ".residual", LayerKind::Add, {}, c, h, w, 0, 0, c * plane});
  rows.push_back({prefix_ + ".relu", LayerKind::ReLU, {}, c, h, w, 0, 0, c * plane});
}

std::size_t MIModule::param_count(int c, MIVariant variant) {
  const std::size_t cc = static_cast<std::size_t>(c);
  switch (variant) {
    case MIVariant::Standard:
    case MIVariant::UniformDilation: return 4 * 9 * cc + 4 * cc + cc * cc;
    case MIVariant::SumFusion: return 4 * 9 * cc + cc * cc;
    case MIVariant::NoChannelInteraction: return 4 * 9 * cc + 4 * cc + cc;
    case MIVariant::ConcatDSConv: return 4 * (9 * cc + cc * cc) + 4 * cc * cc;
    case MIVariant::SumDSConv: return 4 * (9 * cc + cc * cc);
  }
  return 0;
}

template <typename T>
ad::Var<T> mi_forward(ad::Tape<T>& tape, const ad::Var<T>& x, ad::ParamStore<T>& store,
                      const MIModule& module) {
  return module.forward(tape, x, store);
}

template void MIModule::register_params(ad::ParamStore<float>&, Rng&) const;
template void MIModule::register_params(ad::ParamStore<double>&, Rng&) const;
template ad::Var<float> MIModule::forward(ad::Tape<float>&, const ad::Var<float>&,
                                          ad::ParamStore<float>&) const;
template ad::Var<double> MIModule::forward(ad::Tape<double>&, const ad::Var<double>&,
                                           ad::ParamStore<double>&) const;
template ad::Var<float> mi_forward(ad::Tape<float>&, const ad::Var<float>&,
                                   ad::ParamStore<float>&, const MIModule&);
template ad::Var<double> mi_forward(ad::Tape<double>&, const ad::Var<double>&,
                                    ad::ParamStore<double>&, const MIModule&);

}  // namespace minet
