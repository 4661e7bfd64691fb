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

#include "lanebench/kernels.hpp"
#include "lanebench/prediction.hpp"

namespace lanebench {

struct DetectorConfig {
  /// Image-space quadrilateral mapped to the birdseye raster, ordered
  /// far-left, far-right, near-right, near-left.
  std::array<Vec2, 4> trapezoid{};
  ImageSize birdseye_size{185, 285};
  double gradient_weight = 0.65;
  double color_weight = 0.35;
  double pixel_threshold = 0.35;  // lane-pixel cut on the score
  int window_count = 12;
  int window_margin = 10;  // birdseye pixels either side of the window center
  int min_pixels = 6;      // per window
  int degree = 2;
  int peak_spacing = 20;   // birdseye pixels
  double peak_floor = 8.0; // histogram mass needed to seed a lane
  double horizon_row = 0.0;
  double width_per_row = 0.1;  // marking width in pixels per row below the horizon

  void validate() const;
  Homography birdseye_to_image() const;
  LaneScoreParams score_params() const { return {horizon_row, width_per_row, color_weight, gradient_weight}; }

  /// Trapezoid of the road patch 3..60 m ahead and +-9.25 m sideways for a
  /// camera on flat ground.
  static DetectorConfig for_camera(const CameraModel& camera);
};

LanePrediction detect(const Image& image, const DetectorConfig& config, const CameraModel& camera,
                      const std::vector<int>& h_samples, Exec exec = Exec::Parallel);
/// detect() on the camera's default row grid.
LanePrediction detect(const Image& image, const DetectorConfig& config, const CameraModel& camera);

/// Lane score normalized by its maximum; all zero when the score is.
AttentionMap response_map(const Image& image, const DetectorConfig& config, Exec exec = Exec::Parallel);

/// Least-squares x = c0 + c1 y + ... + c_d y^d. Throws ValidationError when
/// there are not more points (distinct in y) than the degree.
std::vector<double> fit_lane(const std::vector<Vec2>& points, int degree);
double eval_poly(const std::vector<double>& coeffs, double y);
double fit_residual(const std::vector<Vec2>& points, const std::vector<double>& coeffs);

/// Supplies attention maps to the augmentation pipeline.
class AttentionProvider {
 public:
  virtual ~AttentionProvider() = default;
  /// Throws when no map exists for the frame.
  virtual AttentionMap attention(const std::string& frame_id, const Image& image) const = 0;
};

class ResponseMapProvider : public AttentionProvider {
 public:
  explicit ResponseMapProvider(DetectorConfig config) : config_(std::move(config)) {}
  AttentionMap attention(const std::string& frame_id, const Image& image) const override;

 private:
  DetectorConfig config_;
};

}  // namespace lanebench
