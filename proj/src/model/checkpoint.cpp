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


#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "minet/model.hpp"

namespace minet {

namespace {

constexpr char kMagic[4] = {'M', 'N', 'E', 'T'};

class Writer {
 public:
  template <typename U>
  void put(U v) {
    static_assert(std::is_unsigned_v<U>);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void put_f32(float f) { put(std::bit_cast<std::uint32_t>(f)); }
  void put_raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  template <typename U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  std::string get_raw(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) {
      throw CheckpointError(CheckpointError::Kind::Truncated, "checkpoint is truncated");
    }
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

template <typename T>
void write_store(Writer& w, const ad::ParamStore<T>& store) {
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& p = store.at(i);
    if (p.name.size() > 0xFFFF) {
      throw CheckpointError(CheckpointError::Kind::Io, "parameter name too long: " + p.name);
    }
    w.put(static_cast<std::uint16_t>(p.name.size()));
    w.put_raw(p.name);
    const Shape4 s = p.value.shape();
    w.put(std::uint8_t{4});
    for (int d : {s.n, s.c, s.h, s.w}) w.put(static_cast<std::uint32_t>(d));
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      w.put_f32(static_cast<float>(p.value.data()[k]));
    }
  }
}

}  // namespace

template <typename T>
std::vector<std::uint8_t> serialize_checkpoint(const Network<T>& net) {
  Writer w;
  w.put_raw(std::string_view(kMagic, 4));
  w.put(kCheckpointVersion);
  w.put(static_cast<std::uint32_t>(net.params().size() + net.buffers().size()));
  write_store(w, net.params());
  write_store(w, net.buffers());
  const std::string cfg = net.config().to_json();
  w.put(static_cast<std::uint32_t>(cfg.size()));
  w.put_raw(cfg);
  return std::move(w.bytes());
}

template <typename T>
void save_checkpoint(const Network<T>& net, const std::string& path) {
  const auto bytes = serialize_checkpoint(net);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(CheckpointError::Kind::Io, "cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(CheckpointError::Kind::Io, "failed writing " + path);
}

template <typename T>
Network<T> deserialize_checkpoint(std::span<const std::uint8_t> bytes,
                                  const std::optional<MINetConfig>& expected) {
  using Kind = CheckpointError::Kind;
  Reader r(bytes);
  if (r.get_raw(4) != std::string_view(kMagic, 4)) {
    throw CheckpointError(Kind::BadMagic, "not a checkpoint (bad magic)");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError(Kind::Version,
                          "unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = r.get<std::uint32_t>();

  struct Entry {
    std::string name;
    Shape4 shape;
    std::vector<float> data;
  };
  std::vector<Entry> entries;
  entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Entry e;
    e.name = r.get_raw(r.get<std::uint16_t>());
    const auto rank = r.get<std::uint8_t>();
    if (rank != 4) {
      throw CheckpointError(Kind::Mismatch, "tensor " + e.name + " has rank " +
                                                std::to_string(rank) + ", expected 4");
    }
    std::array<std::uint32_t, 4> d{};
    for (auto& v : d) v = r.get<std::uint32_t>();
    e.shape = Shape4{static_cast<int>(d[0]), static_cast<int>(d[1]), static_cast<int>(d[2]),
                     static_cast<int>(d[3])};
    const std::size_t n = e.shape.count();
    if (n > r.remaining() / 4) throw CheckpointError(Kind::Truncated, "checkpoint is truncated");
    e.data.resize(n);
    for (auto& v : e.data) v = r.get_f32();
    entries.push_back(std::move(e));
  }
  const std::string cfg_text = r.get_raw(r.get<std::uint32_t>());
  MINetConfig cfg;
  try {
    cfg = MINetConfig::from_json(cfg_text);
  } catch (const std::exception& e) {
    throw CheckpointError(Kind::Config, std::string("bad config echo: ") + e.what());
  }
  if (expected && !(*expected == cfg)) {
    throw CheckpointError(Kind::Config, "checkpoint config " + cfg.to_json() +
                                            " does not match " + expected->to_json());
  }

  Network<T> net(cfg, 0);
  const std::size_t total = net.params().size() + net.buffers().size();
  if (entries.size() != total) {
    throw CheckpointError(Kind::Mismatch, "checkpoint holds " + std::to_string(entries.size()) +
                                              " tensors, network has " + std::to_string(total));
  }
  std::unordered_set<std::string> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.name).second) {
      throw CheckpointError(Kind::Mismatch, "duplicate tensor " + e.name);
    }
    ad::Parameter<T>* p = nullptr;
    if (net.params().contains(e.name)) p = &net.params().get(e.name);
    else if (net.buffers().contains(e.name)) p = &net.buffers().get(e.name);
    else throw CheckpointError(Kind::Mismatch, "unexpected tensor " + e.name);
    if (!(p->value.shape() == e.shape)) {
      throw CheckpointError(Kind::Mismatch, "tensor " + e.name + " has shape " + e.shape.str() +
                                                ", expected " + p->value.shape().str());
    }
    for (std::size_t k = 0; k < e.data.size(); ++k) p->value.data()[k] = static_cast<T>(e.data[k]);
  }
  return net;
}

template <typename T>
Network<T> load_checkpoint(const std::string& path, const std::optional<MINetConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::Io, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_checkpoint<T>(bytes, expected);
}

#define MINET_INSTANTIATE(T)                                                                 \
  template std::vector<std::uint8_t> serialize_checkpoint(const Network<T>&);                \
  template void save_checkpoint(const Network<T>&, const std::string&);                      \
  template Network<T> deserialize_checkpoint(std::span<const std::uint8_t>,                  \
                                             const std::optional<MINetConfig>&);             \
  template Network<T> load_checkpoint(const std::string&, const std::optional<MINetConfig>&);

MINET_INSTANTIATE(float)
MINET_INSTANTIATE(double)

}  // namespace minet
