/******************************************************************************
 * Copyright 2026 The Lanebench Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#include "lanebench/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace lanebench::png {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return f;
}

[[noreturn]] void on_error(png_structp, png_const_charp msg) { throw std::runtime_error(std::string("png: ") + msg); }
void on_warning(png_structp, png_const_charp) {}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), file_(open(path, "rb")) {
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file_.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
      throw std::runtime_error("not a PNG file: " + path.string());
    }
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_error, on_warning);
    info_ = png_create_info_struct(png_);
    png_init_io(png_, file_.get());
    png_set_sig_bytes(png_, 8);
    png_read_info(png_, info_);
  }
  ~Reader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  Header header() const {
    const int color = png_get_color_type(png_, info_);
    return {static_cast<int>(png_get_image_width(png_, info_)), static_cast<int>(png_get_image_height(png_, info_)),
            png_get_bit_depth(png_, info_), (color & PNG_COLOR_MASK_COLOR) == 0, (color & PNG_COLOR_MASK_ALPHA) != 0};
  }

  // Reads the pixel rows after any transforms registered by the caller.
  std::vector<png_byte> rows(std::size_t row_bytes, int height) {
    png_read_update_info(png_, info_);
    std::vector<png_byte> data(row_bytes * static_cast<std::size_t>(height));
    std::vector<png_bytep> ptrs(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) ptrs[y] = data.data() + row_bytes * static_cast<std::size_t>(y);
    png_read_image(png_, ptrs.data());
    png_read_end(png_, nullptr);
    return data;
  }

  png_structp png() { return png_; }

 private:
  std::filesystem::path path_;
  FilePtr file_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

void write(const std::filesystem::path& path, int width, int height, int bit_depth, int color_type,
           const std::vector<png_byte>& data, std::size_t row_bytes) {
  FilePtr file = open(path, "wb");
  png_structp p = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_error, on_warning);
  png_infop info = png_create_info_struct(p);
  try {
    png_init_io(p, file.get());
    png_set_compression_level(p, 6);
    png_set_IHDR(p, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(p, info);
    for (int y = 0; y < height; ++y) {
      png_write_row(p, const_cast<png_bytep>(data.data() + row_bytes * static_cast<std::size_t>(y)));
    }
    png_write_end(p, nullptr);
  } catch (...) {
    png_destroy_write_struct(&p, &info);
    throw;
  }
  png_destroy_write_struct(&p, &info);
}

}  // namespace

Header read_header(const std::filesystem::path& path) { return Reader(path).header(); }

void write_rgb(const std::filesystem::path& path, const Image& image) {
  auto bytes = image.bytes();
  std::vector<png_byte> data(bytes.begin(), bytes.end());
  write(path, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB, data, static_cast<std::size_t>(image.width()) * 3);
}

Image read_rgb(const std::filesystem::path& path) {
  Reader r(path);
  const Header h = r.header();
  if (h.bit_depth == 16) png_set_strip_16(r.png());
  if (h.grayscale) png_set_gray_to_rgb(r.png());
  if (h.bit_depth < 8) png_set_expand(r.png());
  if (h.has_alpha) png_set_strip_alpha(r.png());
  png_set_palette_to_rgb(r.png());
  const auto data = r.rows(static_cast<std::size_t>(h.width) * 3, h.height);
  Image img(h.width, h.height);
  std::copy(data.begin(), data.end(), img.bytes().begin());
  return img;
}

void write_gray(const std::filesystem::path& path, const Raster<std::uint8_t>& gray) {
  auto v = gray.values();
  std::vector<png_byte> data(v.begin(), v.end());
  write(path, gray.width(), gray.height(), 8, PNG_COLOR_TYPE_GRAY, data, static_cast<std::size_t>(gray.width()));
}

Raster<std::uint8_t> read_gray(const std::filesystem::path& path) {
  Reader r(path);
  const Header h = r.header();
  if (!h.grayscale || h.has_alpha || h.bit_depth != 8) {
    throw std::runtime_error(path.string() + ": expected 8-bit grayscale PNG");
  }
  const auto data = r.rows(static_cast<std::size_t>(h.width), h.height);
  Raster<std::uint8_t> out(h.width, h.height);
  std::copy(data.begin(), data.end(), out.values().begin());
  return out;
}

void write_mask(const std::filesystem::path& path, const BinaryMap& mask) {
  const std::size_t row_bytes = (static_cast<std::size_t>(mask.width()) + 7) / 8;
  std::vector<png_byte> data(row_bytes * static_cast<std::size_t>(mask.height()), 0);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) data[row_bytes * y + x / 8] |= static_cast<png_byte>(0x80 >> (x % 8));
    }
  }
  write(path, mask.width(), mask.height(), 1, PNG_COLOR_TYPE_GRAY, data, row_bytes);
}

BinaryMap read_mask(const std::filesystem::path& path) {
  Reader r(path);
  const Header h = r.header();
  if (!h.grayscale || h.bit_depth != 1) throw std::runtime_error(path.string() + ": expected 1-bit mask PNG");
  const std::size_t row_bytes = (static_cast<std::size_t>(h.width) + 7) / 8;
  const auto data = r.rows(row_bytes, h.height);
  BinaryMap out(h.width, h.height);
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) out.at(x, y) = (data[row_bytes * y + x / 8] >> (7 - x % 8)) & 1;
  }
  return out;
}

}  // namespace lanebench::png
