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
#include <fstream>
#include <map>

#include "minet/data.hpp"

namespace minet::data {

namespace {

Tensor4<float> crop(const Tensor4<float>& x, int y0, int x0, int size) {
  Tensor4<float> out(Shape4{x.n(), x.c(), size, size});
  for (int b = 0; b < x.n(); ++b)
    for (int ch = 0; ch < x.c(); ++ch)
      for (int y = 0; y < size; ++y) {
        const float* src = x.plane(b, ch) + static_cast<std::size_t>(y + y0) * x.w() + x0;
        std::copy(src, src + size, out.plane(b, ch) + static_cast<std::size_t>(y) * size);
      }
  return out;
}

void rebinarize(Tensor4<float>& m) {
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = m.data()[i] >= 0.5f ? 1.0f : 0.0f;
}

// Stem -> file for every image directly in dir or one folder below it.
std::map<std::string, fs::path> list_images(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  auto take = [&](const fs::path& p) {
    if (!is_image_file(p)) return;
    const std::string stem = p.stem().string();
    auto [it, fresh] = out.emplace(stem, p);
    if (!fresh) {
      throw DataError("duplicate sample name '" + stem + "': " + it->second.string() + " and " +
                      p.string());
    }
  };
  std::vector<fs::directory_entry> entries(fs::directory_iterator(dir), {});
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.path() < b.path(); });
  for (const auto& e : entries) {
    if (e.is_regular_file()) {
      take(e.path());
    } else if (e.is_directory()) {
      for (const auto& inner : fs::directory_iterator(e.path())) {
        if (inner.is_regular_file()) take(inner.path());
      }
    }
  }
  return out;
}

}  // namespace

std::string_view defect_class_name(DefectClass c) {
  switch (c) {
    case DefectClass::Inclusion: return "inclusion";
    case DefectClass::Patches: return "patches";
    case DefectClass::Scratches: return "scratches";
    case DefectClass::Unknown: return "unknown";
  }
  return "unknown";
}

DefectClass defect_class_of(const fs::path& path) {
  for (const auto& part : path) {
    const std::string s = part.string();
    if (s == "inclusion") return DefectClass::Inclusion;
    if (s == "patches") return DefectClass::Patches;
    if (s == "scratches") return DefectClass::Scratches;
  }
  return DefectClass::Unknown;
}

void AugmentConfig::validate() const {
  if (resize_to < 1 || crop_to < 1) throw std::invalid_argument("resize_to and crop_to must be >= 1");
  if (crop_to > resize_to) throw std::invalid_argument("crop_to must not exceed resize_to");
  if (!(std > 0)) throw std::invalid_argument("normalization std must be > 0");
}

float normalize(std::uint8_t pixel, double mean, double std) {
  return static_cast<float>((pixel / 255.0 - mean) / std);
}

double denormalize(double value, double mean, double std) { return value * std + mean; }

Tensor4<float> image_tensor(const GrayImage& img, double mean, double std) {
  Tensor4<float> t(Shape4{1, 1, img.height, img.width});
  for (std::size_t i = 0; i < img.pixels.size(); ++i) t.data()[i] = normalize(img.pixels[i], mean, std);
  return t;
}

Tensor4<float> mask_tensor(const GrayImage& img) {
  Tensor4<float> t(Shape4{1, 1, img.height, img.width});
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    t.data()[i] = img.pixels[i] >= kMaskThreshold ? 1.0f : 0.0f;
  }
  return t;
}

Sample load_sample(const fs::path& image_path, const fs::path& mask_path, double mean,
                   double std) {
  GrayImage img, mask;
  try {
    img = read_image(image_path);
    mask = read_image(mask_path);
  } catch (const DataError& e) {
    throw DataError("cannot load sample (" + image_path.string() + ", " + mask_path.string() +
                    "): " + e.what());
  }
  if (img.height != mask.height || img.width != mask.width) {
    throw DataError("size mismatch between " + image_path.string() + " (" +
                    std::to_string(img.width) + "x" + std::to_string(img.height) + ") and " +
                    mask_path.string() + " (" + std::to_string(mask.width) + "x" +
                    std::to_string(mask.height) + ")");
  }
  Sample s;
  s.image = image_tensor(img, mean, std);
  s.mask = mask_tensor(mask);
  s.id = image_path.stem().string();
  s.defect_class = defect_class_of(image_path);
  return s;
}

AugmentParams draw_augment(const AugmentConfig& cfg, Rng& rng) {
  const auto span = static_cast<std::uint64_t>(cfg.resize_to - cfg.crop_to + 1);
  AugmentParams p;
  p.crop_y = static_cast<int>(rng.below(span));
  p.crop_x = static_cast<int>(rng.below(span));
  p.flip = cfg.hflip && rng.bernoulli(0.5);
  return p;
}

Sample test_transform(const Sample& s, const AugmentConfig& cfg) {
  Sample out = s;
  const int r = cfg.resize_to;
  if (s.image.h() != r || s.image.w() != r) {
    out.image = resize_bilinear(s.image, r, r);
    out.mask = resize_nearest(s.mask, r, r);
    rebinarize(out.mask);
  }
  return out;
}

Sample apply_augment(const Sample& s, const AugmentConfig& cfg, const AugmentParams& p) {
  if (p.crop_y < 0 || p.crop_x < 0 || p.crop_y + cfg.crop_to > cfg.resize_to ||
      p.crop_x + cfg.crop_to > cfg.resize_to) {
    throw std::out_of_range("crop offset outside the resized image");
  }
  Sample out = test_transform(s, cfg);
  if (cfg.crop_to != cfg.resize_to) {
    out.image = crop(out.image, p.crop_y, p.crop_x, cfg.crop_to);
    out.mask = crop(out.mask, p.crop_y, p.crop_x, cfg.crop_to);
  }
  return p.flip ? flip_sample(out) : out;
}

Sample augment(const Sample& s, const AugmentConfig& cfg, Rng& rng) {
  return apply_augment(s, cfg, draw_augment(cfg, rng));
}

Sample flip_sample(const Sample& s) {
  Sample out = s;
  out.image = flip_horizontal(s.image);
  out.mask = flip_horizontal(s.mask);
  return out;
}

std::vector<std::string> read_index_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open index file " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  return names;
}

std::vector<DatasetEntry> scan_split(const fs::path& root, std::string_view split,
                                     const fs::path& index_file) {
  const fs::path images_dir = root / split / "images";
  const fs::path masks_dir = root / split / "masks";
  if (!fs::is_directory(images_dir)) throw DataError("missing image directory " + images_dir.string());
  if (!fs::is_directory(masks_dir)) throw DataError("missing mask directory " + masks_dir.string());
  const auto images = list_images(images_dir);
  const auto masks = list_images(masks_dir);

  std::vector<std::string> names;
  if (!index_file.empty()) {
    names = read_index_file(index_file);
  } else {
    for (const auto& [name, path] : images) names.push_back(name);
  }
  if (names.empty()) throw DataError("no images found in " + images_dir.string());

  std::vector<DatasetEntry> out;
  for (const auto& name : names) {
    const auto img = images.find(name);
    if (img == images.end()) throw DataError("no image named '" + name + "' in " + images_dir.string());
    const auto mask = masks.find(name);
    if (mask == masks.end()) {
      throw DataError("no mask for " + img->second.string() + " in " + masks_dir.string());
    }
    out.push_back({name, img->second, mask->second, defect_class_of(img->second)});
  }
  return out;
}

std::vector<Sample> load_entries(const std::vector<DatasetEntry>& entries) {
  std::vector<Sample> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    out.push_back(load_sample(e.image, e.mask));
    out.back().id = e.id;
    out.back().defect_class = e.defect_class;
  }
  return out;
}

std::vector<std::vector<BatchItem>> epoch_batches(std::size_t samples, int batch_size,
                                                  bool virtual_flip, Rng& rng) {
  if (samples == 0) throw std::invalid_argument("cannot iterate an empty dataset");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  std::vector<BatchItem> items;
  items.reserve(samples * 2);
  for (std::size_t i = 0; i < samples; ++i) {
    items.push_back({i, false});
    if (virtual_flip) items.push_back({i, true});
  }
  rng.shuffle(items);
  std::vector<std::vector<BatchItem>> batches;
  for (std::size_t i = 0; i < items.size(); i += batch_size) {
    const std::size_t end = std::min(items.size(), i + static_cast<std::size_t>(batch_size));
    batches.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(i),
                         items.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

Batch make_batch(const std::vector<Sample>& samples, const std::vector<BatchItem>& items,
                 const AugmentConfig& cfg, Rng& rng) {
  if (items.empty()) throw std::invalid_argument("empty batch");
  const int c = cfg.crop_to;
  const int n = static_cast<int>(items.size());
  Batch b{Tensor4<float>(Shape4{n, 1, c, c}), Tensor4<float>(Shape4{n, 1, c, c})};
  const std::size_t plane = static_cast<std::size_t>(c) * c;
  for (int i = 0; i < n; ++i) {
    const Sample& src = samples.at(items[i].sample);
    const Sample s = augment(items[i].flipped ? flip_sample(src) : src, cfg, rng);
    std::copy(s.image.data(), s.image.data() + plane, b.images.plane(i, 0));
    std::copy(s.mask.data(), s.mask.data() + plane, b.masks.plane(i, 0));
  }
  return b;
}

BatchStream::BatchStream(const std::vector<Sample>& samples, int batch_size, AugmentConfig cfg,
                         std::uint64_t seed, bool virtual_flip)
    : samples_(&samples),
      batch_size_(batch_size),
      cfg_(std::move(cfg)),
      virtual_flip_(virtual_flip),
      order_rng_(seed),
      augment_rng_(seed ^ 0x9E3779B97F4A7C15ULL) {
  cfg_.validate();
  plan_ = epoch_batches(samples.size(), batch_size_, virtual_flip_, order_rng_);
}

Batch BatchStream::next() {
  if (cursor_ == plan_.size()) {
    plan_ = epoch_batches(samples_->size(), batch_size_, virtual_flip_, order_rng_);
    cursor_ = 0;
    ++epoch_;
  }
  return make_batch(*samples_, plan_[cursor_++], cfg_, augment_rng_);
}

}  // namespace minet::data
