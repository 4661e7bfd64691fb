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
#include <filesystem>
#include <optional>
#include <vector>

#include "lanebench/detector.hpp"
#include "lanebench/illusions.hpp"

namespace lanebench {

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;  // m/s
  bool operator==(const VehicleState&) const = default;
};

struct SimParams {
  double dt = 0.05;
  double wheelbase = 2.7;
  double lookahead = 12.0;
  double speed = 20.1168;         // 45 mph
  double camera_offset = 4.2;     // camera ahead of the rear axle, meters
  double duration = 5.0;
  double deviation_threshold = 0.285;
  double window = 2.5;
  int runs = 5;
  double start_min = 5.0;         // meters before the perturbed stretch
  double start_max = 10.0;
  double stop_horizon = 10.0;

  void validate() const;
};

/// Kinematic bicycle model about the rear axle. Throws on |steering| >= pi/2.
VehicleState step(const VehicleState& state, double steering, double dt, double wheelbase);

/// Camera footprint for a vehicle state.
VehiclePose camera_pose(const VehicleState& state, double camera_offset);

/// Flat-ground back-projection of an image point, returned in the camera
/// ground frame (x forward, y left). nullopt at or above the horizon.
std::optional<Vec2> ground_point(const CameraModel& camera, Vec2 pixel);

/// Pure pursuit toward the ego-lane midpoint `lookahead` meters ahead of the
/// camera. Returns `previous` when no ego boundary is visible there.
double pure_pursuit(const LanePrediction& prediction, const CameraModel& camera, double lookahead, double wheelbase,
                    double camera_offset, double lane_width, double previous);

/// Produces the lane estimate the controller sees at each step.
class LaneSource {
 public:
  virtual ~LaneSource() = default;
  virtual LanePrediction lanes(const Environment& env, const CameraModel& camera, const VehiclePose& pose, double t) = 0;
};

/// Renders the frame and runs the built-in detector.
class DetectorLaneSource : public LaneSource {
 public:
  explicit DetectorLaneSource(DetectorConfig config) : config_(std::move(config)) {}
  LanePrediction lanes(const Environment& env, const CameraModel& camera, const VehiclePose& pose, double t) override;

 private:
  DetectorConfig config_;
};

/// Emits the true boundaries shifted sideways by a fixed amount (left
/// positive), without rendering.
class ScriptedLaneSource : public LaneSource {
 public:
  explicit ScriptedLaneSource(double lateral_offset) : offset_(lateral_offset) {}
  LanePrediction lanes(const Environment& env, const CameraModel& camera, const VehiclePose& pose, double t) override;

 private:
  double offset_;
};

struct EpisodeSpec {
  Environment env;
  double start_s = 0.0;
  double start_offset = 0.0;  // lateral, meters
  double duration = 5.0;
  double dt = 0.05;

  void validate() const;
};

struct TraceSample {
  double t = 0.0;
  VehicleState state;
  double deviation = 0.0;
  double steering = 0.0;
  LanePrediction prediction;
};

struct SimTrace {
  std::vector<TraceSample> samples;
  bool exited = false;  // left the mapped road before the end

  double duration() const { return samples.empty() ? 0.0 : samples.back().t; }
  bool operator==(const SimTrace& o) const;
};

SimTrace run_episode(const EpisodeSpec& spec, LaneSource& source, const CameraModel& camera, const SimParams& params);

struct AsrResult {
  double run_rate = 0.0;    // primary
  double frame_rate = 0.0;  // share of frames within the window
  int successes = 0;
  int runs = 0;
};

/// A run succeeds when at some t <= window its deviation exceeds the
/// threshold while the paired clean run's does not. A single clean trace is
/// paired with every perturbed run.
AsrResult asr(const std::vector<SimTrace>& clean, const std::vector<SimTrace>& perturbed, double deviation_threshold = 0.285,
              double window = 2.5);

/// True when a predicted lane segment crosses the straight path ahead of the
/// camera within `horizon` meters at any step.
bool apollo_stop(const std::vector<LanePrediction>& predictions, const CameraModel& camera, double horizon = 10.0);
bool apollo_stop(const SimTrace& trace, const CameraModel& camera, double horizon = 10.0);

void write_trace_csv(const std::filesystem::path& file, const SimTrace& trace);

/// Road layouts used for closed-loop cases: straight or gentle curves.
Environment sim_environment(RoadType road, std::uint64_t seed);

}  // namespace lanebench
