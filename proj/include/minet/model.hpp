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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "minet/autodiff/ops.hpp"
#include "minet/autodiff/param_store.hpp"
#include "minet/autodiff/tape.hpp"
#include "minet/kernels.hpp"
#include "minet/rng.hpp"
#include "minet/tensor.hpp"

namespace minet {

/// Multi-scale interactive block and its ablation variants.
enum class MIVariant {
  Standard,              // dilations 1/2/4/8, per-index 4->1 fusion, c->c mixing
  UniformDilation,       // all four depthwise branches at dilation 1
  SumFusion,             // branches summed instead of regrouped + fused
  NoChannelInteraction,  // c->c mixing replaced by a per-channel 1x1 scale
  ConcatDSConv,          // four full DSConvs, concatenated, 1x1 reduce 4c->c
  SumDSConv,             // four full DSConvs, summed
};

std::string_view variant_name(MIVariant v);
/// Accepts the snake_case names ("standard", "concat_dsconv", ...) and the
/// ablation labels ("w/o Multi", "S-PW", "w/o CI", "Concat", "Sum").
MIVariant parse_variant(std::string_view name);
std::vector<MIVariant> all_variants();

struct MINetConfig {
  int input_channels = 1;
  std::array<int, 5> stage_widths{16, 32, 64, 96, 128};
  std::array<int, 4> mi_counts{3, 4, 6, 3};  // stages 2..5
  MIVariant variant = MIVariant::Standard;
  int input_size = 368;  // test-time resolution
  int train_size = 336;  // training crop

  void validate() const;
  /// Output width of decoder block i (index 0 == block 1): block i narrows
  /// to the width of encoder stage i-1 so the skip sums line up.
  std::array<int, 5> decoder_widths() const;

  std::string to_json() const;
  static MINetConfig from_json(std::string_view text);
  bool operator==(const MINetConfig&) const = default;
};

enum class LayerKind { Conv, BatchNorm, ReLU, Add, Resize, Sigmoid };

std::string_view layer_kind_name(LayerKind k);

/// One row of the static layer plan for a given input resolution.
struct LayerInfo {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  ConvSpec spec;  // Conv only
  int channels = 0;
  int out_h = 0;
  int out_w = 0;
  std::size_t params = 0;      // trainable values
  std::uint64_t macs = 0;      // Conv only
  std::uint64_t elements = 0;  // output elements touched
};

// --- channel regrouping --------------------------------------------------

/// Interleaves four (n,c,h,w) maps into (n,4c,h,w) so that output channels
/// 4j..4j+3 hold channel j of inputs 0..3.
template <typename T>
Tensor4<T> regroup_channels(std::span<const Tensor4<T>> four);

/// Inverse of regroup_channels.
template <typename T>
std::array<Tensor4<T>, 4> ungroup_channels(const Tensor4<T>& x);

/// Source channel (in the plain concatenation of the four maps) for every
/// regrouped output channel.
std::vector<int> regroup_source_channels(int c);

template <typename T>
ad::Var<T> regroup(ad::Tape<T>& tape, const std::vector<ad::Var<T>>& four);

// --- MI module -------------------------------------------------------------

/// Parameter layout of one MI block under a name prefix; weights live in a
/// ParamStore so that training, checkpoints and the profiler share them.
class MIModule {
 public:
  MIModule(std::string prefix, int channels, MIVariant variant);

  const std::string& prefix() const { return prefix_; }
  int channels() const { return channels_; }
  MIVariant variant() const { return variant_; }

  /// (name, spec) of every convolution, in execution order.
  std::vector<std::pair<std::string, ConvSpec>> convs() const;

  template <typename T>
  void register_params(ad::ParamStore<T>& store, Rng& rng) const;

  template <typename T>
  ad::Var<T> forward(ad::Tape<T>& tape, const ad::Var<T>& x, ad::ParamStore<T>& store) const;

  void describe(int h, int w, std::vector<LayerInfo>& rows) const;

  /// Closed-form trainable parameter count.
  static std::size_t param_count(int c, MIVariant variant);

 private:
  std::array<int, 4> dilations() const;

  std::string prefix_;
  int channels_;
  MIVariant variant_;
};

template <typename T>
ad::Var<T> mi_forward(ad::Tape<T>& tape, const ad::Var<T>& x, ad::ParamStore<T>& store,
                      const MIModule& module);

// --- network ---------------------------------------------------------------

/// Encoder (five stages), decoder (five blocks) and five saliency heads.
template <typename T>
class Network {
 public:
  using Outputs = std::array<ad::Var<T>, 5>;

  explicit Network(MINetConfig config, std::uint64_t seed = 0);

  const MINetConfig& config() const { return config_; }
  ad::ParamStore<T>& params() { return params_; }
  const ad::ParamStore<T>& params() const { return params_; }
  /// Non-trainable state: batch-norm running statistics.
  ad::ParamStore<T>& buffers() { return buffers_; }
  const ad::ParamStore<T>& buffers() const { return buffers_; }

  /// Encoder features F1..F5.
  Outputs backbone(ad::Tape<T>& tape, const ad::Var<T>& x, Mode mode);

  /// Saliency maps S1..S5 at the input resolution; S1 is the final map.
  /// Train mode needs dropout_rng.
  Outputs forward(ad::Tape<T>& tape, const ad::Var<T>& x, Mode mode,
                  Rng* dropout_rng = nullptr);

  /// Inference convenience: S1..S5 values.
  std::array<Tensor4<T>, 5> predict(const Tensor4<T>& x);

  /// Static layer plan for an h x w input.
  std::vector<LayerInfo> describe(int h, int w) const;

  const std::vector<MIModule>& mi_modules() const { return mi_modules_; }

 private:
  void check_input(const Tensor4<T>& x) const;
  ad::Var<T> conv(ad::Tape<T>& tape, const ad::Var<T>& x, const std::string& name,
                  const ConvSpec& spec);
  ad::Var<T> bn_relu(ad::Tape<T>& tape, const ad::Var<T>& x, const std::string& name,
                     Mode mode);
  ad::Var<T> dsconv(ad::Tape<T>& tape, const ad::Var<T>& x, const std::string& name,
                    int c_in, int c_out, int stride, int dilation, Mode mode);

  MINetConfig config_;
  ad::ParamStore<T> params_;
  ad::ParamStore<T> buffers_;
  std::vector<MIModule> mi_modules_;
};

/// Smallest accepted input side (five stride-2 stages).
inline constexpr int kMinInputSize = 32;

// --- checkpoints -----------------------------------------------------------

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { Io, BadMagic, Version, Truncated, Mismatch, Config };
  CheckpointError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
std::vector<std::uint8_t> serialize_checkpoint(const Network<T>& net);

template <typename T>
void save_checkpoint(const Network<T>& net, const std::string& path);

/// Rebuilds a network from a checkpoint. When expected is given, the echoed
/// configuration must match it.
template <typename T>
Network<T> load_checkpoint(const std::string& path,
                           const std::optional<MINetConfig>& expected = std::nullopt);

template <typename T>
Network<T> deserialize_checkpoint(std::span<const std::uint8_t> bytes,
                                  const std::optional<MINetConfig>& expected = std::nullopt);

}  // namespace minet
