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

#include "lanebench/road.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "lanebench/rng.hpp"

namespace lanebench {
namespace {

constexpr std::array<const char*, kRoadTypeCount> kRoadNames = {
    "straight", "gentle_curve", "sharp_turn", "t_junction", "crossroad", "uphill", "downhill", "merge", "roundabout_arc"};

constexpr std::array<const char*, 9> kStyleNames = {
    "white_single_solid",  "white_single_dashed",  "white_double_solid",  "white_double_dashed", "yellow_single_solid",
    "yellow_single_dashed", "yellow_double_solid", "yellow_double_dashed", "road_edge"};

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Vec2 left_normal(double heading) { return {-std::sin(heading), std::cos(heading)}; }

Pose2 advance(const Pose2& start, const CurveSegment& seg, double ds) {
  if (seg.curvature == 0.0) {
    return {start.position + Vec2{std::cos(start.heading), std::sin(start.heading)} * ds, start.heading};
  }
  const double k = seg.curvature;
  const double h = start.heading + k * ds;
  const Vec2 p = start.position + Vec2{(std::sin(h) - std::sin(start.heading)) / k, -(std::cos(h) - std::cos(start.heading)) / k};
  return {p, h};
}

}  // namespace

std::string to_string(RoadType t) { return kRoadNames[static_cast<std::size_t>(t)]; }
std::string to_string(LineStyle s) { return kStyleNames[static_cast<std::size_t>(s)]; }

RoadType parse_road_type(const std::string& name) {
  for (std::size_t i = 0; i < kRoadNames.size(); ++i) {
    if (name == kRoadNames[i]) return static_cast<RoadType>(i);
  }
  throw ValidationError("unknown road type '" + name + "'");
}

LineStyle parse_line_style(const std::string& name) {
  for (std::size_t i = 0; i < kStyleNames.size(); ++i) {
    if (name == kStyleNames[i]) return static_cast<LineStyle>(i);
  }
  throw ValidationError("unknown line style '" + name + "'");
}

bool is_yellow(LineStyle s) { return s >= LineStyle::YellowSingleSolid && s <= LineStyle::YellowDoubleDashed; }
bool is_double(LineStyle s) {
  return s == LineStyle::WhiteDoubleSolid || s == LineStyle::WhiteDoubleDashed || s == LineStyle::YellowDoubleSolid ||
         s == LineStyle::YellowDoubleDashed;
}
bool is_dashed(LineStyle s) {
  return s == LineStyle::WhiteSingleDashed || s == LineStyle::WhiteDoubleDashed || s == LineStyle::YellowSingleDashed ||
         s == LineStyle::YellowDoubleDashed;
}
bool is_painted(LineStyle s) { return s != LineStyle::RoadEdge; }

void RoadSpec::validate() const {
  if (lane_count < 1 || lane_count > 6) throw ValidationError("road.lane_count must be in [1,6]");
  if (!(lane_width > 0.0) || lane_width > 10.0) throw ValidationError("road.lane_width must be in (0,10] m");
  if (boundary_styles.size() != static_cast<std::size_t>(lane_count) + 1) {
    throw ValidationError("road.boundary_styles must list lane_count + 1 styles");
  }
}

RoadSpec RoadSpec::defaults(RoadType type, int lane_count) {
  RoadSpec spec;
  spec.road_type = type;
  spec.lane_count = lane_count;
  spec.boundary_styles.assign(static_cast<std::size_t>(lane_count) + 1, LineStyle::WhiteSingleDashed);
  spec.boundary_styles.front() = LineStyle::YellowSingleSolid;
  spec.boundary_styles.back() = LineStyle::WhiteSingleSolid;
  return spec;
}

std::vector<double> boundary_offsets(const RoadSpec& road) {
  const int ego = road.lane_count / 2;
  std::vector<double> d(static_cast<std::size_t>(road.lane_count) + 1);
  for (int k = 0; k <= road.lane_count; ++k) d[k] = (ego - k) * road.lane_width + 0.5 * road.lane_width;
  return d;
}

RoadGeometry::RoadGeometry(std::vector<CurveSegment> segments, std::vector<GradeSection> grades)
    : segments_(std::move(segments)), grades_(std::move(grades)) {
  if (segments_.empty()) throw ValidationError("road geometry needs at least one segment");
  Pose2 pose{{0.0, 0.0}, 0.0};
  double s = 0.0;
  for (const CurveSegment& seg : segments_) {
    if (!(seg.length > 0.0)) throw ValidationError("road segment length must be positive");
    starts_.push_back({s, pose});
    pose = advance(pose, seg, seg.length);
    s += seg.length;
  }
  total_length_ = s;
  std::sort(grades_.begin(), grades_.end(), [](const GradeSection& a, const GradeSection& b) { return a.start_s < b.start_s; });
}

bool RoadGeometry::straight() const {
  return std::all_of(segments_.begin(), segments_.end(), [](const CurveSegment& c) { return c.curvature == 0.0; });
}

Pose2 RoadGeometry::pose_at(double s) const {
  if (s <= 0.0) return advance(starts_.front().pose, CurveSegment{1.0, 0.0}, s);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const double local = s - starts_[i].s;
    if (local <= segments_[i].length || i + 1 == segments_.size()) {
      if (local > segments_[i].length) {
        // Past the end: continue straight along the final heading.
        const Pose2 end = advance(starts_[i].pose, segments_[i], segments_[i].length);
        return advance(end, CurveSegment{1.0, 0.0}, local - segments_[i].length);
      }
      return advance(starts_[i].pose, segments_[i], local);
    }
  }
  return starts_.back().pose;
}

Vec2 RoadGeometry::point_at(double s, double d) const {
  const Pose2 p = pose_at(s);
  return p.position + left_normal(p.heading) * d;
}

Vec3 RoadGeometry::point3_at(double s, double d) const {
  const Vec2 p = point_at(s, d);
  return {p.x, p.y, elevation(s)};
}

double RoadGeometry::elevation(double s) const {
  double z = 0.0;
  for (std::size_t i = 0; i < grades_.size(); ++i) {
    const double end = i + 1 < grades_.size() ? grades_[i + 1].start_s : std::numeric_limits<double>::infinity();
    const double run = std::min(s, end) - grades_[i].start_s;
    if (run > 0.0) z += grades_[i].grade * run;
  }
  return z;
}

double RoadGeometry::grade_at(double s) const {
  double g = 0.0;
  for (const GradeSection& sec : grades_) {
    if (s >= sec.start_s) g = sec.grade;
  }
  return g;
}

double RoadGeometry::curvature_at(double s) const {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (s < starts_[i].s + segments_[i].length) return s < 0.0 ? 0.0 : segments_[i].curvature;
  }
  return 0.0;
}

RoadCoord RoadGeometry::locate(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  RoadCoord out;
  const std::size_t n = segments_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pose2& start = starts_[i].pose;
    const CurveSegment& seg = segments_[i];
    const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : 0.0;
    const double hi = i + 1 == n ? std::numeric_limits<double>::infinity() : seg.length;
    double local = 0.0;
    if (seg.curvature == 0.0) {
      local = (p - start.position).dot({std::cos(start.heading), std::sin(start.heading)});
    } else {
      const double k = seg.curvature;
      const Vec2 center = start.position + left_normal(start.heading) * (1.0 / k);
      const Vec2 v = p - center;
      // Path point satisfies p(s) - center = -n(s) / k.
      const Vec2 n = v * (-k);
      const double h = std::atan2(-n.x, n.y);
      local = wrap_angle(h - start.heading - 0.5 * k * seg.length) / k + 0.5 * seg.length;
    }
    const double clamped = std::clamp(local, lo, hi);
    Pose2 q;
    if (clamped > seg.length) {
      const Pose2 end = advance(start, seg, seg.length);
      q = advance(end, CurveSegment{1.0, 0.0}, clamped - seg.length);
    } else if (clamped < 0.0) {
      q = advance(start, CurveSegment{1.0, 0.0}, clamped);
    } else {
      q = advance(start, seg, clamped);
    }
    const Vec2 diff = p - q.position;
    const double dist = diff.norm();
    if (dist < best) {
      best = dist;
      out = {starts_[i].s + clamped, diff.dot(left_normal(q.heading))};
    }
  }
  return out;
}

RoadGeometry make_geometry(const RoadSpec& road, std::uint64_t seed) {
  road.validate();
  Rng rng(derive_seed(seed, "road-geometry"));
  std::vector<CurveSegment> segs;
  std::vector<GradeSection> grades;
  std::optional<Crossing> crossing;
  std::optional<MergeTaper> merge;
  switch (road.road_type) {
    case RoadType::Straight:
      segs = {{500.0, 0.0}};
      break;
    case RoadType::GentleCurve: {
      const double lead = rng.uniform(30.0, 50.0);
      const double radius = rng.uniform(500.0, 900.0);
      segs = {{lead, 0.0}, {450.0, rng.sign() / radius}};
      break;
    }
    case RoadType::SharpTurn: {
      const double lead = rng.uniform(35.0, 50.0);
      const double radius = rng.uniform(60.0, 110.0);
      segs = {{lead, 0.0}, {120.0, rng.sign() / radius}, {300.0, 0.0}};
      break;
    }
    case RoadType::TJunction:
    case RoadType::Crossroad: {
      segs = {{500.0, 0.0}};
      Crossing c;
      c.center_s = rng.uniform(45.0, 65.0);
      c.width = rng.uniform(9.0, 12.0);
      if (road.road_type == RoadType::TJunction) {
        const bool left = rng.bernoulli(0.5);
        c.left = left;
        c.right = !left;
      }
      crossing = c;
      break;
    }
    case RoadType::Uphill:
    case RoadType::Downhill: {
      segs = {{500.0, 0.0}};
      const double sign = road.road_type == RoadType::Uphill ? 1.0 : -1.0;
      grades = {{rng.uniform(35.0, 55.0), sign * rng.uniform(0.04, 0.08)}};
      break;
    }
    case RoadType::Merge: {
      segs = {{500.0, 0.0}};
      const double start = rng.uniform(15.0, 25.0);
      merge = MergeTaper{start, start + rng.uniform(60.0, 90.0), road.lane_width};
      break;
    }
    case RoadType::RoundaboutArc: {
      const double radius = rng.uniform(35.0, 50.0);
      segs = {{rng.uniform(25.0, 35.0), 0.0}, {150.0, rng.sign() / radius}};
      break;
    }
  }
  RoadGeometry g(std::move(segs), std::move(grades));
  g.crossing = crossing;
  g.merge = merge;
  g.dash_phase = rng.uniform(0.0, 12.0);
  return g;
}

}  // namespace lanebench
