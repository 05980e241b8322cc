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


#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>

#include "minet/data.hpp"

namespace minet::data {

namespace {

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

std::uint8_t luminance(int r, int g, int b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = msg;
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

struct PngDecode {
  std::string error;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int depth = 0;
  int channels = 0;
  bool depth_error = false;
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;
};

// Only touches state through r, so nothing local is live across longjmp.
bool decode_png(png_structp png, png_infop info, std::FILE* file, PngDecode& r) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_read_info(png, info);
  r.width = png_get_image_width(png, info);
  r.height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  r.depth = png_get_bit_depth(png, info);
  if (r.depth != 8 && color != PNG_COLOR_TYPE_PALETTE) {
    r.depth_error = true;
    return true;
  }
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  r.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  r.buffer.resize(stride * r.height);
  r.rows.resize(r.height);
  for (png_uint_32 y = 0; y < r.height; ++y) r.rows[y] = r.buffer.data() + y * stride;
  png_read_image(png, r.rows.data());
  png_read_end(png, nullptr);
  return true;
}

GrayImage read_png(const fs::path& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) throw DataError("cannot open image " + path.string());
  PngDecode r;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &r.error, png_fail, png_warn);
  if (!png) throw DataError("libpng initialisation failed for " + path.string());
  png_infop info = png_create_info_struct(png);
  const bool ok = info != nullptr && decode_png(png, info, file.get(), r);
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw DataError("cannot decode PNG " + path.string() + ": " + r.error);
  if (r.depth_error) {
    throw DataError("unsupported PNG bit depth " + std::to_string(r.depth) + " in " +
                    path.string() + " (8-bit required)");
  }
  GrayImage img;
  img.height = static_cast<int>(r.height);
  img.width = static_cast<int>(r.width);
  img.pixels.resize(static_cast<std::size_t>(r.width) * r.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const std::uint8_t* px = r.buffer.data() + i * r.channels;
    img.pixels[i] = r.channels >= 3 ? luminance(px[0], px[1], px[2]) : px[0];
  }
  return img;
}

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> DataError {
    return DataError("malformed PGM " + path.string() + ": " + why);
  };
  auto skip = [&] {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> long {
    skip();
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      throw fail("expected a number");
    }
    long v = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1L << 30) throw fail("number out of range");
    }
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw fail("missing P5/P2 magic");
  }
  const bool binary = bytes[1] == '5';
  pos = 2;
  const long w = number(), h = number(), maxval = number();
  if (w < 1 || h < 1) throw fail("empty raster");
  if (maxval < 1 || maxval > 255) {
    throw DataError("unsupported PGM maxval " + std::to_string(maxval) + " in " +
                    path.string() + " (8-bit required)");
  }
  GrayImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.resize(static_cast<std::size_t>(w) * h);
  auto scale = [&](long v) -> std::uint8_t {
    if (v > maxval) throw fail("sample exceeds maxval");
    return static_cast<std::uint8_t>(maxval == 255 ? v : std::lround(v * 255.0 / maxval));
  };
  if (binary) {
    ++pos;  // single whitespace after maxval
    if (bytes.size() - std::min(pos, bytes.size()) < img.pixels.size()) throw fail("truncated");
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      img.pixels[i] = scale(static_cast<unsigned char>(bytes[pos + i]));
    }
  } else {
    for (auto& p : img.pixels) p = scale(number());
  }
  return img;
}

}  // namespace

bool is_image_file(const fs::path& path) {
  const std::string e = lower_ext(path);
  return e == ".png" || e == ".pgm";
}

GrayImage read_image(const fs::path& path) {
  const std::string e = lower_ext(path);
  if (e == ".png") return read_png(path);
  if (e == ".pgm") return read_pgm(path);
  throw DataError("unsupported image format: " + path.string());
}

void write_png(const fs::path& path, const GrayImage& image) {
  if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw DataError("write_png: pixel buffer does not match dimensions");
  }
  png_image out{};
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(image.width);
  out.height = static_cast<png_uint_32>(image.height);
  out.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&out, path.c_str(), 0, image.pixels.data(), 0, nullptr)) {
    const std::string msg = out.message;
    png_image_free(&out);
    throw DataError("cannot write PNG " + path.string() + ": " + msg);
  }
}

void write_pgm(const fs::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write PGM " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw DataError("cannot write PGM " + path.string());
}

}  // namespace minet::data
