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
#include <filesystem>

#include "lanebench/image.hpp"

namespace lanebench::png {

struct Header {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  bool grayscale = false;
  bool has_alpha = false;
};

Header read_header(const std::filesystem::path& path);

void write_rgb(const std::filesystem::path& path, const Image& image);
Image read_rgb(const std::filesystem::path& path);

// 8-bit single channel.
void write_gray(const std::filesystem::path& path, const Raster<std::uint8_t>& gray);
Raster<std::uint8_t> read_gray(const std::filesystem::path& path);

// 1-bit packed mask; nonzero pixels are written as set.
void write_mask(const std::filesystem::path& path, const BinaryMap& mask);
BinaryMap read_mask(const std::filesystem::path& path);

}  // namespace lanebench::png
