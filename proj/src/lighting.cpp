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

#include "lanebench/lighting.hpp"

#include <algorithm>
#include <cmath>

namespace lanebench {
namespace {

// Points spaced `step` apart along the polyline, endpoints included.
std::vector<Vec3> resample(const std::vector<Vec3>& line, double step) {
  std::vector<Vec3> out;
  if (line.empty()) return out;
  out.push_back(line.front());
  double carry = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const Vec3 a = line[i - 1];
    const Vec3 b = line[i];
    const double len = (b - a).norm();
    double pos = step - carry;
    while (pos <= len) {
      out.push_back(a + (b - a) * (pos / len));
      pos += step;
    }
    carry = len - (pos - step);
  }
  if (!(out.back() == line.back())) out.push_back(line.back());
  return out;
}

std::vector<Vec3> at_height(const std::vector<Vec3>& line, double z) {
  std::vector<Vec3> out = line;
  for (Vec3& p : out) p.z = z;
  return out;
}

// Copy of the polyline shifted sideways in the ground plane.
std::vector<Vec3> offset_line(const std::vector<Vec3>& line, double lateral) {
  std::vector<Vec3> out = line;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const Vec3 a = line[i == 0 ? 0 : i - 1];
    const Vec3 b = line[i + 1 < line.size() ? i + 1 : i];
    Vec2 dir = (b - a).xy();
    const double n = dir.norm();
    if (n == 0.0) continue;
    dir = dir * (1.0 / n);
    out[i].x += -dir.y * lateral;
    out[i].y += dir.x * lateral;
  }
  return out;
}

void add_line(std::vector<OccluderPart>& parts, const std::vector<Vec3>& line, double thickness, bool translucent) {
  for (std::size_t i = 1; i < line.size(); ++i) parts.push_back({line[i - 1], line[i], thickness, translucent});
}

void add_posts(std::vector<OccluderPart>& parts, const std::vector<Vec3>& line, double spacing, double top,
               double thickness) {
  for (const Vec3& p : resample(line, spacing)) parts.push_back({{p.x, p.y, 0.0}, {p.x, p.y, top}, thickness, false});
}

}  // namespace

std::vector<OccluderPart> occluder_parts(const StaticFacility& f) {
  std::vector<OccluderPart> parts;
  const double h = f.top_height();
  if (!(h > 0.0) || f.points.size() < 2) return parts;
  switch (f.kind) {
    case FacilityKind::Streetlight:
      add_line(parts, f.points, f.stroke_width > 0.0 ? f.stroke_width : 0.2, false);
      break;
    case FacilityKind::Fence:
      add_posts(parts, f.points, 2.5, h, 0.1);
      add_line(parts, at_height(f.points, h), 0.08, false);
      add_line(parts, at_height(f.points, 0.55 * h), 0.08, false);
      break;
    case FacilityKind::Rail:
      add_posts(parts, f.points, 3.0, h, 0.08);
      for (double frac : {1.0, 0.75, 0.5, 0.25}) add_line(parts, at_height(f.points, frac * h), 0.07, false);
      for (double frac : {0.875, 0.625, 0.375}) add_line(parts, at_height(f.points, frac * h), 0.05, true);
      break;
    case FacilityKind::Wire: {
      const double t = f.stroke_width > 0.0 ? f.stroke_width : 0.06;
      for (double off : {-0.45, 0.0, 0.45}) add_line(parts, offset_line(f.points, off), t, false);
      for (double off : {-0.225, 0.225}) add_line(parts, offset_line(f.points, off), 0.1, true);
      break;
    }
    case FacilityKind::GuardRail:
      add_line(parts, at_height(f.points, h - 0.15), 0.3, false);
      add_posts(parts, f.points, 4.0, h - 0.15, 0.15);
      break;
    case FacilityKind::Wall:
      add_line(parts, at_height(f.points, 0.5 * h), h, false);
      break;
    default:
      break;
  }
  return parts;
}

std::array<Vec2, 4> ShadowBand::polygon() const {
  Vec2 dir = to - from;
  const double n = dir.norm();
  dir = n > 0.0 ? dir * (1.0 / n) : Vec2{1.0, 0.0};
  const Vec2 perp{-dir.y * half_width, dir.x * half_width};
  const Vec2 ext = dir * (n > 0.0 ? 0.0 : half_width);
  return {from + perp - ext, to + perp + ext, to - perp + ext, from - perp - ext};
}

double shadow_dark_factor(double luminance) { return 1.0 - 0.75 * luminance; }
double shadow_bright_factor(double luminance) { return 1.0 + 0.6 * luminance; }

std::vector<ShadowBand> shadow_project(const EnvironmentalConditions& c, const StaticFacility& occluder) {
  std::vector<ShadowBand> bands;
  if (!(c.sun_elevation > 0.0)) return bands;
  const double sin_el = std::sin(c.sun_elevation);
  const double reach = std::cos(c.sun_elevation) / sin_el;  // shadow length per meter of height
  const Vec2 away{-std::cos(c.sun_azimuth) * reach, -std::sin(c.sun_azimuth) * reach};
  auto cast = [&](Vec3 p) { return p.xy() + away * p.z; };
  for (const OccluderPart& part : occluder_parts(occluder)) {
    if (part.a.z <= 0.0 && part.b.z <= 0.0) continue;
    const Vec3 d = part.b - part.a;
    const double len = d.norm();
    const double vertical = len > 0.0 ? std::abs(d.z) / len : 1.0;
    const double hw = 0.5 * part.thickness * (vertical + (1.0 - vertical) / std::max(sin_el, 0.15));
    const double factor = part.translucent ? shadow_bright_factor(c.sun_luminance) : shadow_dark_factor(c.sun_luminance);
    bands.push_back({cast(part.a), cast(part.b), hw, factor});
  }
  return bands;
}

double ReflectionRegion::axis_col(double row) const {
  const double span = bottom_row - top_row;
  const double t = span > 0.0 ? (row - top_row) / span : 0.0;
  return top_col + (bottom_col - top_col) * t;
}

double ReflectionRegion::weight(double col, double row) const {
  if (row < top_row || row > bottom_row) return 0.0;
  const double span = bottom_row - top_row;
  const double t = span > 0.0 ? (row - top_row) / span : 0.0;
  const double hw = half_width_top + (half_width_bottom - half_width_top) * t;
  const double dx = (col - axis_col(row)) / hw;
  const double dy = (row - peak_row) / vertical_spread;
  return intensity * std::exp(-0.5 * (dx * dx + dy * dy));
}

std::vector<ReflectionRegion> reflection_regions(const Environment& env, const CameraModel& camera,
                                                 const VehiclePose& pose) {
  std::vector<ReflectionRegion> out;
  const EnvironmentalConditions& c = env.conditions;
  if (!(c.wetness > 0.0)) return out;
  const CameraFrame cam = camera_frame(camera, pose, &env.geometry);
  const double f = cam.focal;
  const double height = camera.image_height;

  // Low sun ahead: glitter corridor below the sun's column.
  double rel = c.sun_azimuth - pose.heading;
  while (rel > kPi) rel -= 2.0 * kPi;
  while (rel <= -kPi) rel += 2.0 * kPi;
  const double half_fov = 0.5 * camera.horizontal_fov * kPi / 180.0;
  if (c.sun_luminance > 0.0 && c.sun_elevation < 0.75 && std::abs(rel) < 0.9 * half_fov) {
    ReflectionRegion r;
    const double col = cam.cx - f * std::tan(rel);
    const double horizon = camera.horizon_row();
    r.top_col = r.bottom_col = col;
    r.top_row = horizon;
    r.bottom_row = height;
    r.half_width_top = f * 0.01;
    r.half_width_bottom = f * (0.05 + 0.15 * c.wetness);
    r.peak_row = cam.cy + f * std::tan(c.sun_elevation - camera.pitch);
    r.vertical_spread = (height - horizon) * (0.25 + 0.45 * c.wetness);
    r.intensity = std::min(1.0, c.wetness * c.sun_luminance * (1.2 - c.sun_elevation));
    r.tint = {1.0, 0.97, 0.9};
    out.push_back(r);
  }

  for (const LightSource& light : c.light_sources) {
    if (light.kind == LightKind::Streetlight && !c.streetlights_on) continue;
    const double ground = env.geometry.straight() ? env.geometry.elevation(light.position.x) : 0.0;
    const Vec3 base{light.position.x, light.position.y, ground};
    const Vec3 mirror{light.position.x, light.position.y, ground - light.position.z};
    const auto pb = cam.project(base);
    const auto pm = cam.project(mirror);
    if (!pb || !pm) continue;
    const double depth = (base - cam.origin).dot(cam.forward);
    if (depth < 1.0) continue;
    ReflectionRegion r;
    const double stretch = light.kind == LightKind::Streetlight ? 1.6 : 1.3;
    r.top_col = pb->x;
    r.top_row = pb->y;
    r.bottom_col = pb->x + (pm->x - pb->x) * stretch;
    r.bottom_row = pb->y + (pm->y - pb->y) * stretch;
    const double base_width = light.kind == LightKind::Streetlight ? 0.25 + 0.35 * c.wetness : 0.6 + 0.5 * c.wetness;
    r.half_width_top = f * base_width / depth;
    r.half_width_bottom = r.half_width_top * 1.5;
    r.peak_row = pm->y;
    r.vertical_spread = std::max(2.0, 0.6 * (pm->y - pb->y));
    r.intensity = std::min(1.0, c.wetness * light.luminance);
    r.tint = light.tint;
    out.push_back(r);
  }
  return out;
}

}  // namespace lanebench
