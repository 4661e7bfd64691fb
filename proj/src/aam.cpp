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

#include "lanebench/aam.hpp"

#include <algorithm>
#include <cmath>

#include "lanebench/kernels.hpp"
#include "lanebench/rng.hpp"

namespace lanebench {

void AamConfig::validate() const {
  if (!(sigma >= 0.0)) throw ValidationError("aam.sigma must be non-negative");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("aam.threshold must be in (0,1)");
  if (min_area < 0) throw ValidationError("aam.min_area must be non-negative");
  if (!(overlap_theta >= 0.0 && overlap_theta <= 1.0)) throw ValidationError("aam.overlap_theta must be in [0,1]");
  if (!(placement_theta >= 0.0 && placement_theta <= 1.0)) throw ValidationError("aam.placement_theta must be in [0,1]");
  if (!(blend_alpha > 0.0 && blend_alpha <= 1.0)) throw ValidationError("aam.blend_alpha must be in (0,1]");
  if (!(lane_mask_width > 0.0)) throw ValidationError("aam.lane_mask_width must be positive");
  if (patches_per_image < 1) throw ValidationError("aam.patches_per_image must be at least 1");
}

std::set<std::string> select_hard_examples(const std::vector<FrameScore>& scores) {
  if (scores.empty()) throw ValidationError("select_hard_examples: no scores");
  // Offsetting by the first score keeps the mean exact when all scores match.
  const double acc0 = scores.front().accuracy, f10 = scores.front().f1;
  double acc_sum = 0.0, f1_sum = 0.0;
  for (const FrameScore& s : scores) {
    acc_sum += s.accuracy - acc0;
    f1_sum += s.f1 - f10;
  }
  const double n = static_cast<double>(scores.size());
  const double acc_mean = acc0 + acc_sum / n;
  const double f1_mean = f10 + f1_sum / n;
  std::set<std::string> hard;
  for (const FrameScore& s : scores) {
    if (s.accuracy < acc_mean || s.f1 < f1_mean) hard.insert(s.frame_id);
  }
  return hard;
}

AttentionMap blur(const AttentionMap& map, double sigma, Exec exec) { return gaussian_blur(map, sigma, exec); }

BinaryMap binarize(const AttentionMap& map, double threshold, Exec exec) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("binarize: threshold must be in (0,1)");
  return threshold_map(map, threshold, exec);
}

std::vector<Region> extract_regions(const BinaryMap& map, int min_area) {
  const int w = map.width(), h = map.height();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<Region> out;
  std::vector<Pixel> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!map.at(x, y) || seen[static_cast<std::size_t>(y) * w + x]) continue;
      Region r;
      int x0 = x, x1 = x, y0 = y, y1 = y;
      stack.assign(1, {x, y});
      seen[static_cast<std::size_t>(y) * w + x] = 1;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        r.pixels.push_back(p);
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx, ny = p.y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t k = static_cast<std::size_t>(ny) * w + nx;
            if (seen[k] || !map.at(nx, ny)) continue;
            seen[k] = 1;
            stack.push_back({nx, ny});
          }
        }
      }
      if (r.area() > min_area) {
        r.bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

BinaryMap lane_stroke_mask(const LaneAnnotation& gt, ImageSize size, double width) {
  BinaryMap all(size.width, size.height);
  for (const auto& lane : gt.lanes) {
    const BinaryMap m = lane_mask(gt.h_samples, lane, size, width);
    for (std::size_t i = 0; i < m.values().size(); ++i) all.values()[i] |= m.values()[i];
  }
  return all;
}

double region_overlap(const Region& region, const BinaryMap& lanes) {
  if (region.pixels.empty()) return 0.0;
  std::size_t hit = 0;
  for (const Pixel& p : region.pixels) hit += lanes.at(p.x, p.y) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(region.pixels.size());
}

std::vector<Rect> mismatch_mbrs(const std::vector<Region>& regions, const LaneAnnotation& gt, ImageSize size, double theta,
                                double lane_mask_width) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("mismatch_mbrs: theta must be in [0,1]");
  const BinaryMap lanes = lane_stroke_mask(gt, size, lane_mask_width);
  std::vector<Rect> out;
  for (const Region& r : regions) {
    if (region_overlap(r, lanes) < theta) out.push_back(r.bbox);
  }
  return out;
}

std::vector<HaaEntry> extract_haa(const std::string& frame_id, const Image& image, const LaneAnnotation& gt,
                                  const AttentionMap& attention, const AamConfig& config) {
  config.validate();
  validate_attention(attention);
  if (attention.size() != image.size()) throw ValidationError("attention map for " + frame_id + " has the wrong size");
  const BinaryMap b = binarize(blur(attention, config.sigma), config.threshold);
  const auto rects = mismatch_mbrs(extract_regions(b, config.min_area), gt, image.size(), config.overlap_theta,
                                   config.lane_mask_width);
  std::vector<HaaEntry> out;
  for (const Rect& r : rects) {
    HaaEntry e;
    e.source_id = frame_id;
    e.rect = r;
    e.source_size = image.size();
    e.patch = Image(r.width, r.height);
    double sum = 0.0;
    for (int y = 0; y < r.height; ++y) {
      for (int x = 0; x < r.width; ++x) {
        e.patch.set(x, y, image.at(r.x + x, r.y + y));
        sum += attention.at(r.x + x, r.y + y);
      }
    }
    e.score = sum / r.area();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<HaaEntry> build_repo(const std::vector<HardFrame>& frames, const AttentionProvider& provider,
                                 const AamConfig& config) {
  std::vector<HaaEntry> repo;
  for (const HardFrame& f : frames) {
    AttentionMap m;
    try {
      m = provider.attention(f.id, f.image);
    } catch (const std::exception& e) {
      throw ValidationError("no attention map for hard frame " + f.id + ": " + e.what());
    }
    auto entries = extract_haa(f.id, f.image, f.gt, m, config);
    repo.insert(repo.end(), std::make_move_iterator(entries.begin()), std::make_move_iterator(entries.end()));
  }
  return repo;
}

MixResult mix(const Image& image, const LaneAnnotation& gt, const HaaEntry& patch, const AamConfig& config,
              std::uint64_t seed) {
  config.validate();
  const int pw = patch.patch.width(), ph = patch.patch.height();
  if (pw > image.width() || ph > image.height()) throw ValidationError("mix: patch larger than the image");
  int road_top = image.height();
  for (std::size_t r = 0; r < gt.h_samples.size(); ++r) {
    for (const auto& lane : gt.lanes) {
      if (lane[r] != kAbsentLane) road_top = std::min(road_top, gt.h_samples[r]);
    }
  }
  const int y_lo = std::min(road_top, image.height() - ph);
  const BinaryMap lanes = lane_stroke_mask(gt, image.size(), config.lane_mask_width);
  Rng rng(derive_seed(seed, "aam-mix"));
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int x = rng.uniform_int(0, image.width() - pw);
    const int y = rng.uniform_int(y_lo, image.height() - ph);
    std::size_t hit = 0;
    for (int yy = y; yy < y + ph; ++yy) {
      for (int xx = x; xx < x + pw; ++xx) hit += lanes.at(xx, yy);
    }
    if (static_cast<double>(hit) / (static_cast<double>(pw) * ph) >= config.placement_theta) continue;
    MixResult out{image, gt, {x, y, pw, ph}};
    const double a = config.blend_alpha;
    for (int yy = 0; yy < ph; ++yy) {
      for (int xx = 0; xx < pw; ++xx) {
        const Color c = mix(to_color(image.at(x + xx, y + yy)), to_color(patch.patch.at(xx, yy)), a);
        out.image.set(x + xx, y + yy, to_rgb8(c));
      }
    }
    return out;
  }
  throw PlacementError("mix: no off-lane placement found for patch from " + patch.source_id);
}

Image baseline_augment(const Image& image, const std::string& method, const BaselineParams& params, std::uint64_t seed,
                       std::span<const Image> pool) {
  Rng rng(derive_seed(seed, "baseline-" + method));
  if (method == "cutout") {
    const int w = std::clamp(params.cut_width, 0, image.width());
    const int h = std::clamp(params.cut_height, 0, image.height());
    if (w == 0 || h == 0) return image;
    Image out = image;
    const int x0 = rng.uniform_int(0, image.width() - w);
    const int y0 = rng.uniform_int(0, image.height() - h);
    for (int y = y0; y < y0 + h; ++y) {
      for (int x = x0; x < x0 + w; ++x) out.set(x, y, {});
    }
    return out;
  }
  if (method == "mixup") {
    if (!(params.lambda >= 0.0 && params.lambda <= 1.0)) throw ValidationError("mixup: lambda must be in [0,1]");
    if (params.lambda == 1.0) return image;
    if (pool.empty()) throw ValidationError("mixup: empty image pool");
    const Image& other = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
    if (other.size() != image.size()) throw ValidationError("mixup: pool image size differs");
    Image out = image;
    for (int y = 0; y < image.height(); ++y) {
      for (int x = 0; x < image.width(); ++x) {
        out.set(x, y, to_rgb8(mix(to_color(other.at(x, y)), to_color(image.at(x, y)), params.lambda)));
      }
    }
    return out;
  }
  throw ValidationError("unknown augmentation method '" + method + "'");
}

}  // namespace lanebench
