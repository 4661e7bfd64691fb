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
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lanebench/dataset_io.hpp"
#include "lanebench/detector.hpp"
#include "lanebench/metrics.hpp"

namespace lanebench {

struct AamConfig {
  double sigma = 4.0;
  double threshold = 0.5;
  int min_area = 64;
  double overlap_theta = 0.3;
  double placement_theta = 0.1;
  double blend_alpha = 0.8;
  double lane_mask_width = 30.0;
  int patches_per_image = 1;

  void validate() const;
};

class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frames whose accuracy or F1 lies strictly below the dataset mean.
std::set<std::string> select_hard_examples(const std::vector<FrameScore>& scores);

AttentionMap blur(const AttentionMap& map, double sigma, Exec exec = Exec::Parallel);
BinaryMap binarize(const AttentionMap& map, double threshold, Exec exec = Exec::Parallel);

struct Pixel {
  int x = 0;
  int y = 0;
  bool operator==(const Pixel&) const = default;
};

struct Region {
  std::vector<Pixel> pixels;
  Rect bbox;
  int area() const { return static_cast<int>(pixels.size()); }
};

/// 8-connected components with more than min_area pixels, in scan order of
/// their first pixel.
std::vector<Region> extract_regions(const BinaryMap& map, int min_area);

/// Union of ground-truth lane strokes.
BinaryMap lane_stroke_mask(const LaneAnnotation& gt, ImageSize size, double width);

/// Fraction of the region's pixels that fall on a lane stroke.
double region_overlap(const Region& region, const BinaryMap& lanes);

std::vector<Rect> mismatch_mbrs(const std::vector<Region>& regions, const LaneAnnotation& gt, ImageSize size, double theta,
                                double lane_mask_width);

/// blur -> binarize -> regions -> mismatch MBRs -> patches for one frame.
std::vector<HaaEntry> extract_haa(const std::string& frame_id, const Image& image, const LaneAnnotation& gt,
                                  const AttentionMap& attention, const AamConfig& config);

struct HardFrame {
  std::string id;
  Image image;
  LaneAnnotation gt;
};

std::vector<HaaEntry> build_repo(const std::vector<HardFrame>& frames, const AttentionProvider& provider,
                                 const AamConfig& config);

struct MixResult {
  Image image;
  LaneAnnotation annotation;
  Rect placed;
};

/// Blends the patch at a seeded off-lane position inside the road rows.
/// Throws PlacementError after 100 rejected samples.
MixResult mix(const Image& image, const LaneAnnotation& gt, const HaaEntry& patch, const AamConfig& config,
              std::uint64_t seed);

struct BaselineParams {
  int cut_width = 0;
  int cut_height = 0;
  double lambda = 0.5;
};

/// "cutout" zeroes one seeded rectangle; "mixup" blends with a seeded image
/// from the pool at weight lambda for the input.
Image baseline_augment(const Image& image, const std::string& method, const BaselineParams& params, std::uint64_t seed,
                       std::span<const Image> pool = {});

}  // namespace lanebench
