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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "lanebench/image.hpp"
#include "lanebench/scene.hpp"

namespace lanebench::testing {

// Largest one-to-one matching by enumerating every injective assignment of
// rows to columns (or to "unmatched").
inline int brute_matching(const std::vector<std::vector<double>>& iou, double threshold) {
  const int rows = static_cast<int>(iou.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(iou[0].size());
  int best = 0;
  std::vector<int> pick(rows, -1);
  std::vector<bool> used(cols, false);
  auto rec = [&](auto&& self, int i, int count) -> void {
    if (i == rows) {
      best = std::max(best, count);
      return;
    }
    self(self, i + 1, count);
    for (int j = 0; j < cols; ++j) {
      if (used[j] || iou[i][j] < threshold) continue;
      used[j] = true;
      self(self, i + 1, count + 1);
      used[j] = false;
    }
  };
  rec(rec, 0, 0);
  return best;
}

// Dense 2D Gaussian convolution with reflected borders, the slow reference
// for the separable blur.
template <typename Map>
Map dense_blur(const Map& src, double sigma) {
  if (sigma == 0.0) return src;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& v : k) v /= sum;
  auto reflect = [](int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
    return i;
  };
  Map out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          acc += k[dy + r] * k[dx + r] * src.at(reflect(x + dx, src.width()), reflect(y + dy, src.height()));
        }
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

// Attention map with faint noise plus one saturated rectangle, on a
// 320x180 frame whose two vertical lanes sit at x = 80 and x = 240.
struct PlantedMap {
  Raster<double> map;
  Rect rect;
  LaneAnnotation gt;
};

inline LaneAnnotation planted_lanes() {
  LaneAnnotation gt;
  for (int y = 60; y < 180; y += 10) gt.h_samples.push_back(y);
  gt.lanes = {std::vector<double>(gt.h_samples.size(), 80.0), std::vector<double>(gt.h_samples.size(), 240.0)};
  return gt;
}

inline PlantedMap planted_map(std::uint64_t seed, bool on_lane) {
  std::mt19937_64 gen(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
  PlantedMap p{Raster<double>(320, 180), {}, planted_lanes()};
  std::uniform_real_distribution<double> noise(0.0, 0.05);
  for (double& v : p.map.values()) v = noise(gen);
  if (on_lane) {
    // Centered on a lane stroke, inside the annotated rows.
    const int w = uni(26, 40), h = uni(26, 60);
    const int cx = uni(0, 1) ? 80 : 240;
    p.rect = {cx - w / 2, uni(60, 168 - h), w, h};
  } else {
    // Between the lane strokes, or above the annotated rows.
    // Kept 12 px (3 sigma of the default blur) clear of the image border,
    // where reflected padding would mirror the rectangle into the gap.
    if (uni(0, 1)) {
      const int w = uni(26, 60), h = uni(26, 80);
      p.rect = {uni(100, 220 - w), uni(12, 168 - h), w, h};
    } else {
      const int w = uni(26, 80), h = uni(26, 32);
      p.rect = {uni(12, 308 - w), uni(12, 44 - h), w, h};
    }
  }
  for (int y = p.rect.y; y < p.rect.y + p.rect.height; ++y) {
    for (int x = p.rect.x; x < p.rect.x + p.rect.width; ++x) p.map.at(x, y) = 1.0;
  }
  return p;
}

}  // namespace lanebench::testing
