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

#include "lanebench/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace lanebench {
namespace {

double luminance(Rgb8 p) { return (0.299 * p.r + 0.587 * p.g + 0.114 * p.b) / 255.0; }

// Similarity of a pixel to white or yellow paint, from hue and saturation
// in HLS space.
double paint_chroma(Rgb8 p) {
  const double r = p.r / 255.0, g = p.g / 255.0, b = p.b / 255.0;
  const double hi = std::max({r, g, b});
  const double lo = std::min({r, g, b});
  const double light = 0.5 * (hi + lo);
  const double delta = hi - lo;
  if (light <= 0.0 || light >= 1.0) return light >= 1.0 ? 1.0 : 0.0;
  const double sat = delta / (1.0 - std::abs(2.0 * light - 1.0));
  const double white = std::clamp(1.0 - sat / 0.3, 0.0, 1.0);
  double yellow = 0.0;
  if (delta > 0.0 && hi == r) {
    double hue = 60.0 * (g - b) / delta;
    if (hue < 0.0) hue += 360.0;
    yellow = std::clamp(1.0 - std::abs(hue - 45.0) / 20.0, 0.0, 1.0) * std::clamp((sat - 0.25) / 0.25, 0.0, 1.0);
  }
  return std::max(white, yellow);
}

template <typename Fn>
void for_rows(int rows, Exec exec, Fn&& fn) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < rows; ++y) fn(y);
  } else {
    for (int y = 0; y < rows; ++y) fn(y);
  }
}

}  // namespace

Vec2 Homography::apply(Vec2 p) const {
  const double w = m[6] * p.x + m[7] * p.y + m[8];
  return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

Homography Homography::inverse() const {
  Eigen::Matrix3d a;
  a << m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8];
  const Eigen::Matrix3d inv = a.inverse();
  Homography h;
  for (int i = 0; i < 9; ++i) h.m[i] = inv(i / 3, i % 3) / inv(2, 2);
  return h;
}

Homography Homography::from_points(const std::array<Vec2, 4>& src, const std::array<Vec2, 4>& dst) {
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> rhs;
  for (int i = 0; i < 4; ++i) {
    const double x = src[i].x, y = src[i].y, u = dst[i].x, v = dst[i].y;
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
    rhs(2 * i) = u;
    rhs(2 * i + 1) = v;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
  if (!lu.isInvertible()) throw ValidationError("homography correspondences are degenerate");
  const Eigen::Matrix<double, 8, 1> h = lu.solve(rhs);
  Homography out;
  for (int i = 0; i < 8; ++i) out.m[i] = h(i);
  out.m[8] = 1.0;
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be non-negative");
  if (sigma == 0.0) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

Raster<double> gaussian_blur(const Raster<double>& src, double sigma, Exec exec) {
  const std::vector<double> k = gaussian_kernel(sigma);
  if (k.size() == 1) return src;
  const int r = static_cast<int>(k.size() / 2);
  const int w = src.width(), h = src.height();
  Raster<double> tmp(w, h);
  for_rows(h, exec, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = -r; j <= r; ++j) acc += k[j + r] * src.at(reflect_index(x + j, w), y);
      tmp.at(x, y) = acc;
    }
  });
  Raster<double> out(w, h);
  for_rows(h, exec, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = -r; j <= r; ++j) acc += k[j + r] * tmp.at(x, reflect_index(y + j, h));
      out.at(x, y) = acc;
    }
  });
  return out;
}

BinaryMap threshold_map(const Raster<double>& src, double threshold, Exec exec) {
  BinaryMap out(src.width(), src.height());
  for_rows(src.height(), exec, [&](int y) {
    for (int x = 0; x < src.width(); ++x) out.at(x, y) = src.at(x, y) > threshold ? 1 : 0;
  });
  return out;
}

Raster<double> lane_score(const Image& image, const LaneScoreParams& params, Exec exec) {
  const int w = image.width(), h = image.height();
  Raster<double> lum(w, h);
  for_rows(h, exec, [&](int y) {
    for (int x = 0; x < w; ++x) lum.at(x, y) = luminance(image.at(x, y));
  });
  Raster<double> out(w, h);
  const int first = std::max(0, static_cast<int>(std::floor(params.horizon_row)) + 2);
  for_rows(h, exec, [&](int y) {
    if (y < first) return;
    const double below = y + 0.5 - params.horizon_row;
    const int k = std::max(2, static_cast<int>(std::lround(1.5 * params.width_per_row * below)) + 1);
    for (int x = 0; x < w; ++x) {
      const double c = lum.at(x, y);
      const double left = lum.at(reflect_index(x - k, w), y);
      const double right = lum.at(reflect_index(x + k, w), y);
      const double bg = 0.5 * (left + right);
      const double step = std::max(std::abs(c - left), std::abs(c - right));
      const double grad = std::clamp(step / (0.35 * ((left + right + c) / 3.0 + 0.05)), 0.0, 1.0);
      const double color = paint_chroma(image.at(x, y)) * std::clamp((c / (bg + 0.02) - 1.3) / 0.7, 0.0, 1.0);
      out.at(x, y) = params.color_weight * color + params.gradient_weight * grad;
    }
  });
  return out;
}

Raster<double> warp_bilinear(const Raster<double>& src, const Homography& out_to_src, ImageSize out_size, Exec exec) {
  Raster<double> out(out_size.width, out_size.height);
  const int sw = src.width(), sh = src.height();
  auto sample = [&](int x, int y) { return (x >= 0 && y >= 0 && x < sw && y < sh) ? src.at(x, y) : 0.0; };
  for_rows(out_size.height, exec, [&](int v) {
    for (int u = 0; u < out_size.width; ++u) {
      const Vec2 p = out_to_src.apply({u + 0.5, v + 0.5});
      const double fx = p.x - 0.5, fy = p.y - 0.5;
      if (!(fx > -1.0 && fy > -1.0 && fx < sw && fy < sh)) continue;
      const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
      const double ax = fx - x0, ay = fy - y0;
      out.at(u, v) = (1 - ay) * ((1 - ax) * sample(x0, y0) + ax * sample(x0 + 1, y0)) +
                     ay * ((1 - ax) * sample(x0, y0 + 1) + ax * sample(x0 + 1, y0 + 1));
    }
  });
  return out;
}

}  // namespace lanebench
