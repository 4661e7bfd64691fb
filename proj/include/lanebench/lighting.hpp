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

#include "lanebench/scene.hpp"

namespace lanebench {

/// One physical member of a raised facility: a straight bar from a to b.
/// Translucent members pass focused light and brighten the road.
struct OccluderPart {
  Vec3 a;
  Vec3 b;
  double thickness = 0.0;
  bool translucent = false;
};

/// Decomposes a raised facility into bars (posts, rails, wires, beams).
/// Surface features yield no parts.
std::vector<OccluderPart> occluder_parts(const StaticFacility& facility);

/// Road-plane strip covered by the shadow of one occluder part. factor < 1
/// darkens, factor > 1 brightens.
struct ShadowBand {
  Vec2 from;
  Vec2 to;
  double half_width = 0.0;
  double factor = 1.0;

  double length() const { return (to - from).norm(); }
  std::array<Vec2, 4> polygon() const;
  bool contains(Vec2 p) const { return segment_distance(p, from, to) <= half_width; }
};

double shadow_dark_factor(double luminance);
double shadow_bright_factor(double luminance);

std::vector<ShadowBand> shadow_project(const EnvironmentalConditions& conditions, const StaticFacility& occluder);

/// Image-space streak of mirrored light on the wet road. The streak runs
/// from (top_col, top_row) to (bottom_col, bottom_row); its horizontal
/// profile is Gaussian with a half width interpolated along the streak and
/// its vertical profile peaks at peak_row.
struct ReflectionRegion {
  double top_col = 0.0;
  double top_row = 0.0;
  double bottom_col = 0.0;
  double bottom_row = 0.0;
  double half_width_top = 1.0;
  double half_width_bottom = 1.0;
  double peak_row = 0.0;
  double vertical_spread = 1.0;
  double intensity = 0.0;
  Color tint{1.0, 1.0, 1.0};

  /// Blend weight in [0, intensity] at a pixel position.
  double weight(double col, double row) const;
  /// Column of the streak axis at a row.
  double axis_col(double row) const;
};

std::vector<ReflectionRegion> reflection_regions(const Environment& env, const CameraModel& camera,
                                                 const VehiclePose& pose);

}  // namespace lanebench
