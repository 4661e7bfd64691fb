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

#include <array>
#include <vector>

#include "lanebench/image.hpp"

namespace lanebench {

/// Projective map between two image planes, row-major 3x3.
struct Homography {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  Vec2 apply(Vec2 p) const;
  Homography inverse() const;
  /// Exact map sending src[i] to dst[i]; throws ValidationError when the
  /// four correspondences are degenerate.
  static Homography from_points(const std::array<Vec2, 4>& src, const std::array<Vec2, 4>& dst);
};

/// Sampled Gaussian, normalized to unit sum, radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Symmetric border reflection (edge pixel repeated) for any offset.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

/// Separable Gaussian convolution with reflected borders. sigma == 0 copies.
Raster<double> gaussian_blur(const Raster<double>& src, double sigma, Exec exec = Exec::Parallel);

/// 1 where value > threshold (strict), else 0.
BinaryMap threshold_map(const Raster<double>& src, double threshold, Exec exec = Exec::Parallel);

struct LaneScoreParams {
  double horizon_row = 0.0;
  /// Expected marking width in pixels per row below the horizon.
  double width_per_row = 0.1;
  double color_weight = 0.35;
  double gradient_weight = 0.65;
};

/// Per-pixel lane-marking likelihood in [0,1]: colour match to white or
/// yellow paint plus relative horizontal gradient magnitude.
Raster<double> lane_score(const Image& image, const LaneScoreParams& params, Exec exec = Exec::Parallel);

/// Bilinear resampling: out(u, v) = src(H(u + 0.5, v + 0.5) - 0.5), zero outside.
Raster<double> warp_bilinear(const Raster<double>& src, const Homography& out_to_src, ImageSize out_size,
                             Exec exec = Exec::Parallel);

}  // namespace lanebench
