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
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lanebench/scene.hpp"

namespace lanebench {

enum class IllusionCategory { RoadDamage, TrafficObstruction, Shadow, Reflection };

enum class IllusionType {
  RoadCrack,
  RoadRepair,
  TireMarks,
  GuardRail,
  Pedestrian,
  Vehicle,
  Bicycle,
  StreetlightShadow,
  FenceShadow,
  RailShadow,
  WireShadow,
  SunlightReflection,
  StreetlightReflection,
  VehicleReflection,
};

inline constexpr int kIllusionTypeCount = 14;
inline constexpr int kMaxSeverity = 5;

const std::array<IllusionType, kIllusionTypeCount>& all_illusion_types();
const std::array<IllusionCategory, 4>& all_categories();
IllusionCategory category_of(IllusionType t);
std::string to_string(IllusionType t);
std::string to_string(IllusionCategory c);
IllusionType parse_illusion_type(const std::string& name);
IllusionCategory parse_category(const std::string& name);

using IllusionParams = std::map<std::string, double>;

struct IllusionSpec {
  IllusionCategory category = IllusionCategory::RoadDamage;
  IllusionType type = IllusionType::RoadCrack;
  int severity = 1;
  std::uint64_t seed = 0;
  IllusionParams params;

  /// Category matches the type, severity in range, every parameter present.
  void validate() const;
  bool operator==(const IllusionSpec&) const = default;
};

/// Severity schedule for one type. anchor_s is the arc length where the
/// perturbed stretch of road begins.
IllusionParams resolve_params(IllusionType type, int severity, std::uint64_t seed, double anchor_s = 20.0);

/// Convenience: a validated spec with resolved parameters.
IllusionSpec make_spec(IllusionType type, int severity, std::uint64_t seed, double anchor_s = 20.0);

/// Parameters that only grow with severity.
std::vector<std::string> magnitude_params(IllusionType type);

/// False for pairs listed in the compatibility table.
bool applicable(IllusionType type, RoadType road);

/// Returns a perturbed copy of env. Road damage edits statics, traffic edits
/// dynamics, shadows and reflections edit conditions.
Environment apply(const Environment& env, const IllusionSpec& spec);

/// 1 where any channel differs by more than tolerance.
BinaryMap perturbation_mask(const Image& clean, const Image& perturbed, int tolerance);

}  // namespace lanebench
