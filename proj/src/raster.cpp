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

#include "lanebench/raster.hpp"

#include <algorithm>
#include <cmath>

namespace lanebench {

Image::Image(int width, int height, Rgb8 fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw ValidationError("image dimensions must be non-negative");
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

void validate_attention(const AttentionMap& map) {
  for (double v : map.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("attention value outside [0,1]");
  }
}

double rect_iou(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.width, b.x + b.width);
  const int y1 = std::min(a.y + a.height, b.y + b.height);
  const double inter = (x1 > x0 && y1 > y0) ? static_cast<double>(x1 - x0) * (y1 - y0) : 0.0;
  const double uni = static_cast<double>(a.area()) + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

void stroke_polyline(BinaryMap& mask, std::span<const Vec2> points, double width) {
  if (points.empty() || width <= 0.0) return;
  const double r = 0.5 * width;
  auto stamp = [&](Vec2 a, Vec2 b) {
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
    const int x1 = std::min(mask.width() - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
    const int y1 = std::min(mask.height() - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (segment_distance({x + 0.5, y + 0.5}, a, b) <= r) mask.at(x, y) = 1;
      }
    }
  };
  if (points.size() == 1) {
    stamp(points[0], points[0]);
    return;
  }
  for (std::size_t i = 1; i < points.size(); ++i) stamp(points[i - 1], points[i]);
}

void scan_convex_polygon(ImageSize size, std::span<const Vec2> polygon, const std::function<void(int, int)>& fn) {
  if (polygon.size() < 3) return;
  double ymin = polygon[0].y, ymax = polygon[0].y;
  for (const Vec2& p : polygon) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const int row0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
  const int row1 = std::min(size.height - 1, static_cast<int>(std::ceil(ymax - 0.5)));
  for (int y = row0; y <= row1; ++y) {
    const double yc = y + 0.5;
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
      const Vec2 a = polygon[i];
      const Vec2 b = polygon[(i + 1) % polygon.size()];
      if ((a.y <= yc && b.y > yc) || (b.y <= yc && a.y > yc)) {
        const double x = a.x + (yc - a.y) / (b.y - a.y) * (b.x - a.x);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    if (lo > hi) continue;
    const int c0 = std::max(0, static_cast<int>(std::ceil(lo - 0.5)));
    const int c1 = std::min(size.width - 1, static_cast<int>(std::floor(hi - 0.5)));
    for (int x = c0; x <= c1; ++x) fn(x, y);
  }
}

}  // namespace lanebench
