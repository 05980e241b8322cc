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

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "minet/rng.hpp"
#include "minet/tensor.hpp"

namespace minet::data {

namespace fs = std::filesystem;

/// Unreadable, malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Reads an 8-bit PNG (gray, gray+alpha, RGB, RGBA, palette) or a binary/ASCII
/// PGM with maxval <= 255. Colour is reduced by 0.299R + 0.587G + 0.114B.
GrayImage read_image(const fs::path& path);
void write_png(const fs::path& path, const GrayImage& image);
void write_pgm(const fs::path& path, const GrayImage& image);
bool is_image_file(const fs::path& path);

inline constexpr double kMean = 0.4669;
inline constexpr double kStd = 0.2437;
inline constexpr int kMaskThreshold = 128;

enum class DefectClass { Inclusion, Patches, Scratches, Unknown };
std::string_view defect_class_name(DefectClass c);
/// Class from any path component named inclusion/patches/scratches.
DefectClass defect_class_of(const fs::path& path);

struct Sample {
  Tensor4<float> image;  // (1,1,H,W), normalized
  Tensor4<float> mask;   // (1,1,H,W), {0,1}
  std::string id;
  DefectClass defect_class = DefectClass::Unknown;
};

struct AugmentConfig {
  int resize_to = 368;
  int crop_to = 336;
  bool hflip = true;
  double mean = kMean;
  double std = kStd;
  std::uint64_t seed = 0;

  void validate() const;
};

float normalize(std::uint8_t pixel, double mean = kMean, double std = kStd);
double denormalize(double value, double mean = kMean, double std = kStd);

Tensor4<float> image_tensor(const GrayImage& img, double mean = kMean, double std = kStd);
Tensor4<float> mask_tensor(const GrayImage& img);

Sample load_sample(const fs::path& image_path, const fs::path& mask_path,
                   double mean = kMean, double std = kStd);

struct AugmentParams {
  int crop_y = 0;
  int crop_x = 0;
  bool flip = false;
};

AugmentParams draw_augment(const AugmentConfig& cfg, Rng& rng);
/// Resize (bilinear image, nearest + re-binarized mask), crop, optional flip.
Sample apply_augment(const Sample& s, const AugmentConfig& cfg, const AugmentParams& p);
Sample augment(const Sample& s, const AugmentConfig& cfg, Rng& rng);
/// Test-time path: resize to cfg.resize_to only.
Sample test_transform(const Sample& s, const AugmentConfig& cfg);
Sample flip_sample(const Sample& s);

// --- dataset layout --------------------------------------------------------

struct DatasetEntry {
  std::string id;
  fs::path image;
  fs::path mask;
  DefectClass defect_class = DefectClass::Unknown;
};

/// root/<split>/{images,masks}/NAME.png, optionally nested one level in class
/// folders. When index_file is non-empty only the listed names are used, in
/// file order; otherwise entries are sorted by id.
std::vector<DatasetEntry> scan_split(const fs::path& root, std::string_view split,
                                     const fs::path& index_file = {});

std::vector<std::string> read_index_file(const fs::path& path);

std::vector<Sample> load_entries(const std::vector<DatasetEntry>& entries);

struct BatchItem {
  std::size_t sample = 0;
  bool flipped = false;

  bool operator==(const BatchItem&) const = default;
};

/// One epoch: every sample plain and (with virtual_flip) pre-flipped,
/// shuffled with rng, chunked with the short tail kept.
std::vector<std::vector<BatchItem>> epoch_batches(std::size_t samples, int batch_size,
                                                  bool virtual_flip, Rng& rng);

struct Batch {
  Tensor4<float> images;  // (B,1,crop,crop)
  Tensor4<float> masks;
};

/// Materializes a batch: optional pre-flip, then augment with rng.
Batch make_batch(const std::vector<Sample>& samples, const std::vector<BatchItem>& items,
                 const AugmentConfig& cfg, Rng& rng);

/// Infinite deterministic batch stream over epochs.
class BatchStream {
 public:
  BatchStream(const std::vector<Sample>& samples, int batch_size, AugmentConfig cfg,
              std::uint64_t seed, bool virtual_flip = true);

  Batch next();
  std::size_t epoch() const { return epoch_; }
  std::size_t batches_per_epoch() const { return plan_.size(); }

 private:
  const std::vector<Sample>* samples_;
  int batch_size_;
  AugmentConfig cfg_;
  bool virtual_flip_;
  Rng order_rng_;
  Rng augment_rng_;
  std::vector<std::vector<BatchItem>> plan_;
  std::size_t cursor_ = 0;
  std::size_t epoch_ = 0;
};

}  // namespace minet::data
