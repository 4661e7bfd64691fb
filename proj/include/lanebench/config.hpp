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
#include <string>
#include <vector>

#include "lanebench/aam.hpp"
#include "lanebench/detector.hpp"
#include "lanebench/illusions.hpp"
#include "lanebench/metrics.hpp"
#include "lanebench/simloop.hpp"

namespace lanebench {

struct SuiteConfig {
  std::vector<IllusionType> types;  // defaults to all 14
  std::vector<int> severities{1, 2, 3, 4, 5};
  int cases = 4;
  int frames_per_case = 5;
  std::vector<RoadType> road_types{RoadType::Straight, RoadType::GentleCurve};
  double anchor_s = 20.0;     // start of the perturbed stretch
  double camera_s = 10.0;     // camera position of the first frame
  double frame_spacing = 1.5; // meters between consecutive frames of a case
  bool masks = true;
  int mask_tolerance = 8;

  void validate() const;
};

/// Detector tunables; the trapezoid and horizon always follow the camera.
struct DetectorTuning {
  double gradient_weight = 0.65;
  double color_weight = 0.35;
  double pixel_threshold = 0.35;
  int window_count = 12;
  int window_margin = 10;
  int min_pixels = 6;
  int degree = 2;
  int peak_spacing = 20;
  double peak_floor = 8.0;

  DetectorConfig for_camera(const CameraModel& camera) const;
};

struct SimCase {
  IllusionType type = IllusionType::RoadCrack;
  int severity = 5;
  RoadType road = RoadType::Straight;
  bool operator==(const SimCase&) const = default;
};

std::string to_string(const SimCase& c);
/// "type:severity:road", e.g. "road_crack:5:straight".
SimCase parse_sim_case(const std::string& text);

struct SimConfig {
  SimParams params;
  double anchor_s = 60.0;
  std::vector<SimCase> cases;  // defaults to eight cases, two per category

  void validate() const;
};

struct HarnessConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output = "out";
  int workers = 0;  // 0: OpenMP default
  CameraModel camera;
  SuiteConfig suite;
  DetectorTuning detector;
  MetricsParams metrics;
  AamConfig aam;
  std::optional<std::filesystem::path> scores;  // aam input, defaults to the evaluate output
  SimConfig sim;

  void validate() const;
  DetectorConfig detector_config() const { return detector.for_camera(camera); }
};

HarnessConfig default_config();

/// Parses an INI file with sections general, camera, suite, detector,
/// metrics, aam and sim. Unknown sections or keys, malformed values and
/// invariant violations throw ValidationError naming the key.
HarnessConfig load_config(const std::filesystem::path& file);
HarnessConfig parse_config(const std::string& text);

/// Every setting with its resolved value, in load_config syntax.
std::string dump_config(const HarnessConfig& config);

}  // namespace lanebench
