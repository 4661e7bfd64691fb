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
#include <utility>
#include <vector>

#include "lanebench/image.hpp"
#include "lanebench/road.hpp"

namespace lanebench {

/// Pinhole camera mounted above the road. Pixel coordinates are continuous
/// with pixel (i, j) covering [i, i+1) x [j, j+1).
struct CameraModel {
  int image_width = 1280;
  int image_height = 720;
  double horizontal_fov = 90.0;  // degrees
  double mount_height = 1.5;     // meters
  double pitch = 0.05;           // radians, downward positive

  void validate() const;
  double focal() const;
  double cx() const { return 0.5 * image_width; }
  double cy() const { return 0.5 * image_height; }
  ImageSize size() const { return {image_width, image_height}; }
  /// Row of the vanishing line for a flat road ahead.
  double horizon_row() const;

  static CameraModel fast();
  bool operator==(const CameraModel&) const = default;
};

/// Ground footprint of the camera: world position and heading.
struct VehiclePose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  bool operator==(const VehiclePose&) const = default;
};

enum class FacilityKind { Road, LaneLine, GuardRail, Fence, Streetlight, Rail, Wire, Wall, RepairPatch, Crack, TireMark };
std::string to_string(FacilityKind k);

enum class Shape { Polyline, Polygon };

struct Appearance {
  Color base;
  double reflectivity = 0.0;
  double opacity = 1.0;
  bool operator==(const Appearance&) const = default;
};

/// Road furniture and surface features. Points are world meters; z is the
/// height above the local road surface.
struct StaticFacility {
  int id = 0;
  FacilityKind kind = FacilityKind::Road;
  Shape shape = Shape::Polyline;
  std::vector<Vec3> points;
  double stroke_width = 0.0;  // polylines
  Appearance appearance;

  void validate() const;
  /// Whether the facility rises above the road plane.
  double top_height() const;
  bool operator==(const StaticFacility&) const = default;
};

enum class DynamicKind { Pedestrian, Vehicle, Bicycle };
std::string to_string(DynamicKind k);

struct Footprint {
  double width = 0.0;
  double length = 0.0;
  double height = 0.0;
  bool operator==(const Footprint&) const = default;
};

struct TimedPose {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  bool operator==(const TimedPose&) const = default;
};

struct DynamicObject {
  int id = 0;
  DynamicKind kind = DynamicKind::Vehicle;
  Footprint footprint;
  std::vector<TimedPose> trajectory;
  Color color;

  void validate() const;
  /// Linear interpolation, clamped to the first and last pose.
  TimedPose pose_at(double t) const;
  bool operator==(const DynamicObject&) const = default;
};

enum class LightKind { Streetlight, VehicleSurface };

/// A point source of light that can mirror in a wet road.
struct LightSource {
  LightKind kind = LightKind::Streetlight;
  Vec3 position;
  double luminance = 1.0;
  Color tint{1.0, 1.0, 1.0};
  bool operator==(const LightSource&) const = default;
};

struct EnvironmentalConditions {
  double sun_luminance = 0.8;  // l in [0,1]
  double sun_elevation = 1.1;  // (0, pi/2]
  double sun_azimuth = 0.0;    // world frame, direction towards the sun
  double wetness = 0.0;
  bool streetlights_on = false;
  std::string time_tag = "day";
  /// Occluders whose shadows the lighting throws onto the road.
  std::vector<StaticFacility> shadow_casters;
  std::vector<LightSource> light_sources;

  void validate() const;
  Vec3 sun_direction() const;
  bool operator==(const EnvironmentalConditions&) const = default;
};

/// The scene triple plus the road it is built around.
struct Environment {
  std::vector<StaticFacility> statics;
  std::vector<DynamicObject> dynamics;
  EnvironmentalConditions conditions;
  RoadSpec road;
  RoadGeometry geometry;

  void validate() const;
  int next_static_id() const;
  bool operator==(const Environment&) const = default;
};

inline constexpr int kAbsentLane = -2;

/// Row-anchored lane positions. Absent points hold kAbsentLane.
struct LaneAnnotation {
  std::vector<int> h_samples;
  std::vector<std::vector<double>> lanes;

  void validate(ImageSize size) const;
  bool operator==(const LaneAnnotation&) const = default;
};

/// Every 10 rows from 40% of the image height to the bottom.
std::vector<int> default_h_samples(const CameraModel& camera);

Environment build_case(const RoadSpec& road, const EnvironmentalConditions& conditions, std::uint64_t seed);

/// Pinhole projection of a world point; nullopt when it is not in front of
/// the camera.
std::optional<Vec2> project(const CameraModel& camera, const VehiclePose& pose, Vec3 world_point);

/// Camera position and pitch for a pose, taking the road elevation into account.
struct CameraFrame {
  Vec3 origin;
  Vec3 forward;  // optical axis
  Vec3 right;
  Vec3 up;
  double focal = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  std::optional<Vec2> project(Vec3 p) const;
  Vec3 ray(double col, double row) const;
};

CameraFrame camera_frame(const CameraModel& camera, const VehiclePose& pose, const RoadGeometry* road = nullptr);

/// Pose on the reference line at arc length s, shifted laterally by d.
VehiclePose pose_on_road(const Environment& env, double s, double d = 0.0, double heading_offset = 0.0);

LaneAnnotation ground_truth(const Environment& env, const CameraModel& camera, const VehiclePose& pose,
                            const std::vector<int>& h_samples, double lateral_shift = 0.0);

struct RenderResult {
  Image image;
  LaneAnnotation annotation;
};

RenderResult render(const Environment& env, const CameraModel& camera, const VehiclePose& pose, double t,
                    Exec exec = Exec::Parallel);

}  // namespace lanebench
