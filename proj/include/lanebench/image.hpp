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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lanebench/common.hpp"

namespace lanebench {

struct ImageSize {
  int width = 0;
  int height = 0;
  bool operator==(const ImageSize&) const = default;
};

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb8&) const = default;
};

inline std::uint8_t quantize(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

inline Rgb8 to_rgb8(Color c) { return {quantize(c.r), quantize(c.g), quantize(c.b)}; }
inline Color to_color(Rgb8 p) { return {p.r / 255.0, p.g / 255.0, p.b / 255.0}; }

/// Row-major 8-bit RGB raster.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb8 fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  ImageSize size() const { return {width_, height_}; }
  bool empty() const { return data_.empty(); }

  Rgb8 at(int x, int y) const {
    const std::size_t i = index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(int x, int y, Rgb8 p) {
    const std::size_t i = index(x, y);
    data_[i] = p.r;
    data_[i + 1] = p.g;
    data_[i + 2] = p.b;
  }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::span<const std::uint8_t> bytes() const { return data_; }
  std::span<std::uint8_t> bytes() { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Single-channel raster. Used for attention maps (double) and binary maps (uint8).
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), values_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  ImageSize size() const { return {width_, height_}; }

  T at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  T& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }

  bool operator==(const Raster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

/// Per-pixel salience, every value in [0,1].
using AttentionMap = Raster<double>;
/// Values restricted to {0,1}.
using BinaryMap = Raster<std::uint8_t>;

/// Throws ValidationError when any value leaves [0,1].
void validate_attention(const AttentionMap& map);

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int area() const { return width * height; }
  bool within(ImageSize s) const { return x >= 0 && y >= 0 && width >= 0 && height >= 0 && x + width <= s.width && y + height <= s.height; }
  bool operator==(const Rect&) const = default;
};

double rect_iou(const Rect& a, const Rect& b);

}  // namespace lanebench
