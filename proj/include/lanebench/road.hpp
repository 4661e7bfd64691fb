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
#include <optional>
#include <string>
#include <vector>

#include "lanebench/common.hpp"

namespace lanebench {

enum class RoadType { Straight, GentleCurve, SharpTurn, TJunction, Crossroad, Uphill, Downhill, Merge, RoundaboutArc };

enum class LineStyle {
  WhiteSingleSolid,
  WhiteSingleDashed,
  WhiteDoubleSolid,
  WhiteDoubleDashed,
  YellowSingleSolid,
  YellowSingleDashed,
  YellowDoubleSolid,
  YellowDoubleDashed,
  RoadEdge,
};

inline constexpr int kRoadTypeCount = 9;

std::string to_string(RoadType t);
std::string to_string(LineStyle s);
RoadType parse_road_type(const std::string& name);
LineStyle parse_line_style(const std::string& name);

bool is_yellow(LineStyle s);
bool is_double(LineStyle s);
bool is_dashed(LineStyle s);
bool is_painted(LineStyle s);

/// Layout of the carriageway. Boundaries are listed left to right as seen
/// from the ego vehicle, so there are lane_count + 1 of them.
struct RoadSpec {
  RoadType road_type = RoadType::Straight;
  int lane_count = 2;
  double lane_width = 3.7;
  std::vector<LineStyle> boundary_styles;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  static RoadSpec defaults(RoadType type, int lane_count = 2);
  bool operator==(const RoadSpec&) const = default;
};

struct CurveSegment {
  double length = 0.0;
  double curvature = 0.0;  // 1/m, positive turns left
  bool operator==(const CurveSegment&) const = default;
};

/// Piecewise-linear road elevation over arc length. Only straight layouts
/// carry grade changes, so arc length coincides with the world x axis.
struct GradeSection {
  double start_s = 0.0;
  double grade = 0.0;  // rise over run
  bool operator==(const GradeSection&) const = default;
};

struct Crossing {
  double center_s = 0.0;
  double width = 10.0;
  bool left = true;
  bool right = true;
  bool operator==(const Crossing&) const = default;
};

/// Extra tapering surface on the right of the carriageway.
struct MergeTaper {
  double start_s = 0.0;
  double end_s = 0.0;
  double width = 3.7;
  bool operator==(const MergeTaper&) const = default;
};

struct Pose2 {
  Vec2 position;
  double heading = 0.0;
};

/// Road-frame coordinates: arc length along the reference line and signed
/// lateral offset (left positive).
struct RoadCoord {
  double s = 0.0;
  double d = 0.0;
};

/// Analytic road shape. The reference line is the ego-lane center; it starts
/// at the world origin heading along +x.
class RoadGeometry {
 public:
  RoadGeometry() = default;
  RoadGeometry(std::vector<CurveSegment> segments, std::vector<GradeSection> grades);

  const std::vector<CurveSegment>& segments() const { return segments_; }
  const std::vector<GradeSection>& grades() const { return grades_; }
  double length() const { return total_length_; }

  Pose2 pose_at(double s) const;
  Vec2 point_at(double s, double d) const;
  Vec3 point3_at(double s, double d) const;
  double elevation(double s) const;
  double grade_at(double s) const;
  double curvature_at(double s) const;
  /// Closest reference-line coordinate of a world point; s is clamped to the
  /// road extent.
  RoadCoord locate(Vec2 p) const;

  bool straight() const;

  std::optional<Crossing> crossing;
  std::optional<MergeTaper> merge;
  double shoulder = 1.5;
  double dash_phase = 0.0;

  bool operator==(const RoadGeometry&) const = default;

 private:
  struct SegmentStart {
    double s = 0.0;
    Pose2 pose;
    bool operator==(const SegmentStart& o) const {
      return s == o.s && pose.position == o.pose.position && pose.heading == o.pose.heading;
    }
  };
  std::vector<CurveSegment> segments_;
  std::vector<GradeSection> grades_;
  std::vector<SegmentStart> starts_;
  double total_length_ = 0.0;
};

/// Lateral offsets of lane boundaries relative to the ego-lane center, left
/// to right. The ego lane is lane_count / 2 counted from the left.
std::vector<double> boundary_offsets(const RoadSpec& road);

/// Seeded road shape for a layout.
RoadGeometry make_geometry(const RoadSpec& road, std::uint64_t seed);

}  // namespace lanebench
