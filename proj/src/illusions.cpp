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

#include "lanebench/illusions.hpp"

#include <algorithm>
#include <cmath>

#include "lanebench/rng.hpp"

namespace lanebench {
namespace {

struct TypeInfo {
  IllusionType type;
  IllusionCategory category;
  const char* name;
};

constexpr std::array<TypeInfo, kIllusionTypeCount> kTypes = {{
    {IllusionType::RoadCrack, IllusionCategory::RoadDamage, "road_crack"},
    {IllusionType::RoadRepair, IllusionCategory::RoadDamage, "road_repair"},
    {IllusionType::TireMarks, IllusionCategory::RoadDamage, "tire_marks"},
    {IllusionType::GuardRail, IllusionCategory::RoadDamage, "guard_rail"},
    {IllusionType::Pedestrian, IllusionCategory::TrafficObstruction, "pedestrian"},
    {IllusionType::Vehicle, IllusionCategory::TrafficObstruction, "vehicle"},
    {IllusionType::Bicycle, IllusionCategory::TrafficObstruction, "bicycle"},
    {IllusionType::StreetlightShadow, IllusionCategory::Shadow, "streetlight_shadow"},
    {IllusionType::FenceShadow, IllusionCategory::Shadow, "fence_shadow"},
    {IllusionType::RailShadow, IllusionCategory::Shadow, "rail_shadow"},
    {IllusionType::WireShadow, IllusionCategory::Shadow, "wire_shadow"},
    {IllusionType::SunlightReflection, IllusionCategory::Reflection, "sunlight_reflection"},
    {IllusionType::StreetlightReflection, IllusionCategory::Reflection, "streetlight_reflection"},
    {IllusionType::VehicleReflection, IllusionCategory::Reflection, "vehicle_reflection"},
}};

constexpr std::array<const char*, 4> kCategoryNames = {"road_damage", "traffic_obstruction", "shadow", "reflection"};

const TypeInfo& info(IllusionType t) { return kTypes[static_cast<std::size_t>(t)]; }

double lerp(double a, double b, int severity) { return a + (b - a) * (severity - 1) / 4.0; }
int lerp_count(int a, int b, int severity) { return static_cast<int>(std::lround(lerp(a, b, severity))); }

std::uint64_t item_seed(const IllusionSpec& spec, std::string_view tag, int index) {
  return derive_seed(spec.seed, tag, static_cast<std::uint64_t>(index));
}

// Per-spec draws shared by all items (side of the road, sun direction).
Rng layout_rng(const IllusionSpec& spec) { return Rng(derive_seed(spec.seed, "layout", static_cast<std::uint64_t>(spec.type))); }

constexpr Color kCrackColor{0.10, 0.10, 0.10};
constexpr Color kRepairColor{0.17, 0.17, 0.18};
constexpr Color kTireColor{0.06, 0.06, 0.06};
constexpr Color kMetal{0.78, 0.79, 0.80};
constexpr Color kFenceColor{0.45, 0.40, 0.35};
constexpr Color kRailColor{0.50, 0.50, 0.52};
constexpr Color kWireColor{0.10, 0.10, 0.10};
constexpr Color kPoleColor{0.55, 0.55, 0.58};

constexpr std::array<Color, 5> kVehiclePalette = {{
    {0.90, 0.90, 0.88}, {0.62, 0.63, 0.65}, {0.70, 0.12, 0.10}, {0.12, 0.18, 0.40}, {0.08, 0.08, 0.09}}};
constexpr std::array<Color, 4> kClothing = {{{0.85, 0.85, 0.80}, {0.20, 0.25, 0.45}, {0.60, 0.15, 0.15}, {0.15, 0.15, 0.15}}};

struct RoadFrame {
  const RoadGeometry& g;
  std::vector<double> offsets;

  double heading(double s) const { return g.pose_at(s).heading; }
  Vec3 at(double s, double d, double z = 0.0) const {
    const Vec2 p = g.point_at(s, d);
    return {p.x, p.y, z};
  }
  double left_edge() const { return offsets.front() + g.shoulder; }
  double right_edge() const { return offsets.back() - g.shoulder; }
  std::size_t ego() const { return (offsets.size() - 1) / 2; }
  double ego_left() const { return offsets[ego()]; }
  double ego_right() const { return offsets[ego() + 1]; }
  // One of the two ego-lane boundaries.
  double ego_boundary(Rng& rng) const { return rng.bernoulli(0.5) ? ego_left() : ego_right(); }
};

RoadFrame frame_of(const Environment& env) { return {env.geometry, boundary_offsets(env.road)}; }

StaticFacility facility(int id, FacilityKind kind, Shape shape, std::vector<Vec3> pts, double width, Color color,
                        double reflectivity, double opacity) {
  StaticFacility f;
  f.id = id;
  f.kind = kind;
  f.shape = shape;
  f.points = std::move(pts);
  f.stroke_width = width;
  f.appearance = {color, reflectivity, opacity};
  return f;
}

// ---------------------------------------------------------------- road damage

void add_cracks(Environment& env, const IllusionSpec& spec) {
  const RoadFrame rf = frame_of(env);
  const auto& p = spec.params;
  const double a = p.at("anchor_s");
  int id = env.next_static_id();
  for (int i = 0; i < static_cast<int>(p.at("count")); ++i) {
    Rng rng(item_seed(spec, "crack", i));
    const double s0 = a + rng.uniform(0.0, 20.0);
    const double d0 = rf.ego_boundary(rng) + rng.sign() * rng.uniform(0.25, 0.9);
    const double slope = rng.uniform(-0.08, 0.08);
    std::vector<Vec3> pts;
    double d = d0;
    for (double u = 0.0; u <= p.at("length") + 1e-9; u += 0.5) {
      pts.push_back(rf.at(s0 + u, d));
      d += slope * 0.5 + rng.uniform(-0.06, 0.06);
    }
    env.statics.push_back(facility(id++, FacilityKind::Crack, Shape::Polyline, std::move(pts), p.at("width"), kCrackColor,
                                   0.05, p.at("opacity")));
  }
}

void add_repairs(Environment& env, const IllusionSpec& spec) {
  const RoadFrame rf = frame_of(env);
  const auto& p = spec.params;
  const double a = p.at("anchor_s");
  int id = env.next_static_id();
  for (int i = 0; i < static_cast<int>(p.at("count")); ++i) {
    Rng rng(item_seed(spec, "repair", i));
    const double s0 = a + rng.uniform(0.0, 18.0);
    const double center = rf.ego_boundary(rng) + rng.uniform(-0.6, 0.6);
    const double half_w = 0.5 * p.at("patch_width");
    const double len = p.at("patch_length") * rng.uniform(0.8, 1.2);
    std::vector<Vec3> pts = {rf.at(s0, center + half_w), rf.at(s0 + len, center + half_w), rf.at(s0 + len, center - half_w),
                             rf.at(s0, center - half_w)};
    env.statics.push_back(
        facility(id++, FacilityKind::RepairPatch, Shape::Polygon, std::move(pts), 0.0, kRepairColor, 0.05, p.at("opacity")));
  }
}

void add_tire_marks(Environment& env, const IllusionSpec& spec) {
  const RoadFrame rf = frame_of(env);
  const auto& p = spec.params;
  const double a = p.at("anchor_s");
  int id = env.next_static_id();
  for (int i = 0; i < static_cast<int>(p.at("pairs")); ++i) {
    Rng rng(item_seed(spec, "tire", i));
    const double s0 = a + rng.uniform(0.0, 15.0);
    const double d0 = rf.ego_boundary(rng) + rng.sign() * rng.uniform(0.2, 1.0);
    const double bend = rng.sign() * rng.uniform(0.004, 0.012);  // braking arc curvature
    for (double side : {-0.8, 0.8}) {
      std::vector<Vec3> pts;
      for (double u = 0.0; u <= p.at("length") + 1e-9; u += 0.5) pts.push_back(rf.at(s0 + u, d0 + side + bend * u * u));
      env.statics.push_back(
          facility(id++, FacilityKind::TireMark, Shape::Polyline, std::move(pts), 0.22, kTireColor, 0.0, p.at("opacity")));
    }
  }
}

void add_guard_rails(Environment& env, const IllusionSpec& spec) {
  const RoadFrame rf = frame_of(env);
  const auto& p = spec.params;
  const double a = p.at("anchor_s");
  int id = env.next_static_id();
  for (int i = 0; i < static_cast<int>(p.at("segments")); ++i) {
    Rng rng(item_seed(spec, "guard_rail", i));
    const bool left = i % 2 == 0 ? rng.bernoulli(0.3) : rng.bernoulli(0.7);
    const double d = left ? rf.offsets.front() + rng.uniform(0.3, 1.2) : rf.offsets.back() - rng.uniform(0.3, 1.2);
    const double s0 = a + rng.uniform(0.0, 25.0);
    std::vector<Vec3> pts;
    for (double u = 0.0; u <= p.at("segment_length") + 1e-9; u += 2.0) pts.push_back(rf.at(s0 + u, d, 0.75));
    env.statics.push_back(facility(id++, FacilityKind::GuardRail, Shape::Polyline, std::move(pts), 0.3, kMetal, 0.6, 1.0));
  }
}

// ------------------------------------------------------------------- traffic

void add_participants(Environment& env, const IllusionSpec& spec) {
  const RoadFrame rf = frame_of(env);
  const auto& p = spec.params;
  const double a = p.at("anchor_s");
  const double nearest = p.at("nearest_distance");
  const int count = static_cast<int>(p.at("count"));
  const double ego_left = rf.ego_left();
  const double ego_right = rf.ego_right();
  int id = 1;
  for (const DynamicObject& o : env.dynamics) id = std::max(id, o.id + 1);
  for (int i = 0; i < count; ++i) {
    Rng rng(item_seed(spec, "participant", i));
    DynamicObject obj;
    obj.id = id++;
    // Spacing shrinks together with the nearest distance.
    const double s = a + nearest * (1.0 + 0.35 * i) + rng.uniform(-1.0, 1.0);
    double d = 0.0;
    double speed = 0.0;
    double rel_heading = 0.0;
    switch (spec.type) {
      case IllusionType::Vehicle: {
        obj.kind = DynamicKind::Vehicle;
        obj.footprint = {1.8, 4.5, 1.5};
        obj.color = kVehiclePalette[rng.uniform_int(0, static_cast<int>(kVehiclePalette.size()) - 1)];
        const double pick = rng.uniform();
        if (pick < 0.4) {
          d = rng.uniform(-0.7, 0.7);  // ego lane
        } else if (pick < 0.75) {
          d = (rng.bernoulli(0.5) ? ego_left : ego_right) + rng.uniform(-0.5, 0.5);  // changing lanes
          rel_heading = rng.uniform(-0.15, 0.15);
        } else {
          d = ego_left + 0.5 * env.road.lane_width + rng.uniform(-0.4, 0.4);
        }
        speed = rng.uniform(0.0, 8.0);
        break;
      }
      case IllusionType::Pedestrian:
        obj.kind = DynamicKind::Pedestrian;
        obj.footprint = {0.5, 0.5, 1.7};
        obj.color = kClothing[rng.uniform_int(0, static_cast<int>(kClothing.size()) - 1)];
        d = rng.uniform(ego_right - 1.0, ego_left + 1.0);
        rel_heading = rng.sign() * 0.5 * kPi;
        speed = rng.uniform(0.8, 1.6);
        break;
      default:
        obj.kind = DynamicKind::Bicycle;
        obj.footprint = {0.6, 1.8, 1.6};
        obj.color = kClothing[rng.uniform_int(0, static_cast<int>(kClothing.size()) - 1)];
        d = ego_right + rng.uniform(-0.8, 0.8);
        speed = rng.uniform(3.0, 6.0);
        break;
    }
    const double h = rf.heading(s) + rel_heading;
    const Vec2 start = rf.g.point_at(s, d);
    const double horizon = 30.0;
    obj.trajectory = {{0.0, start.x, start.y, h},
                      {horizon, start.x + speed * horizon * std::cos(h), start.y + speed * horizon * std::sin(h), h}};
    env.dynamics.push_back(std::move(obj));
  }
}

// ------------------------------------------------------------------- shadows

// Sun on one side of the road, shadows falling across it.
void set_sun(EnvironmentalConditions& c, const IllusionSpec& spec, double road_heading, double side, double skew) {
  c.sun_luminance = spec.params.at("sun_luminance");
  c.sun_elevation = spec.params.at("sun_elevation");
  c.sun_azimuth = road_heading + side * 0.5 * kPi + skew;
}

// Lateral shift of a shadow cast from height z, in road coordinates.
double shadow_shift(const EnvironmentalConditions& c, double road_heading, double z) {
  const double reach = std::cos(c.sun_elevation) / std::sin(c.sun_elevation);
  return -z * reach * std::sin(c.sun_azimuth - road_heading);
}

void add_shadow_casters(Environment& env, const IllusionSpec& spec) {
  const RoadFrame rf = frame_of(env);
  const auto& p = spec.params;
  const double a = p.at("anchor_s");
  Rng layout = layout_rng(spec);
  const double side = layout.sign();  // +1: casters and sun on the left
  const double skew = layout.uniform(-0.45, 0.45);
  const double h0 = rf.heading(a);
  EnvironmentalConditions& c = env.conditions;
  set_sun(c, spec, h0, side, skew);
  const double edge = side > 0 ? rf.left_edge() + 0.4 : rf.right_edge() - 0.4;
  int id = 1000;
  for (const StaticFacility& f : c.shadow_casters) id = std::max(id, f.id + 1);

  switch (spec.type) {
    case IllusionType::StreetlightShadow: {
      const double height = 8.0;
      for (int i = 0; i < static_cast<int>(p.at("count")); ++i) {
        Rng rng(item_seed(spec, "streetlight", i));
        const double s = a + 4.0 + 9.0 * i + rng.uniform(-2.0, 2.0);
        const double d = edge + side * rng.uniform(0.0, 0.8);
        std::vector<Vec3> pts = {rf.at(s, d), rf.at(s, d, height), rf.at(s, d - side * 1.8, height + 0.3)};
        c.shadow_casters.push_back(facility(id++, FacilityKind::Streetlight, Shape::Polyline, std::move(pts), 0.22,
                                            kPoleColor, 0.3, 1.0));
      }
      break;
    }
    case IllusionType::FenceShadow:
    case IllusionType::RailShadow: {
      const bool fence = spec.type == IllusionType::FenceShadow;
      const double height = p.at("height");
      const double s0 = a + layout.uniform(-4.0, 2.0);
      std::vector<Vec3> pts;
      for (double u = 0.0; u <= p.at("extent") + 1e-9; u += 2.5) pts.push_back(rf.at(s0 + u, edge, height));
      c.shadow_casters.push_back(facility(id++, fence ? FacilityKind::Fence : FacilityKind::Rail, Shape::Polyline,
                                          std::move(pts), 0.08, fence ? kFenceColor : kRailColor, 0.2, 1.0));
      break;
    }
    case IllusionType::WireShadow: {
      for (int i = 0; i < static_cast<int>(p.at("count")); ++i) {
        Rng rng(item_seed(spec, "wire", i));
        const double height = rng.uniform(6.0, 9.0);
        const double sag = rng.uniform(0.6, 1.2);
        const double span = 30.0;
        // Place the bundle so its shadow lands near an ego-lane boundary.
        const double target = rf.ego_boundary(rng) + rng.uniform(-1.0, 1.0);
        const double d = target - shadow_shift(c, h0, height - 0.5 * sag);
        const double s0 = a + rng.uniform(-6.0, 0.0);
        std::vector<Vec3> pts;
        const double cat = span * span / (8.0 * sag);  // catenary parameter giving the sag
        for (double u = 0.0; u <= p.at("extent") + 1e-9; u += 1.5) {
          const double local = std::fmod(u, span) - 0.5 * span;
          const double z = height - sag + cat * (std::cosh(local / cat) - 1.0);
          pts.push_back(rf.at(s0 + u, d, z));
        }
        c.shadow_casters.push_back(
            facility(id++, FacilityKind::Wire, Shape::Polyline, std::move(pts), 0.06, kWireColor, 0.1, 1.0));
      }
      break;
    }
    default:
      break;
  }
}

// --------------------------------------------------------------- reflections

void add_reflections(Environment& env, const IllusionSpec& spec) {
  const RoadFrame rf = frame_of(env);
  const auto& p = spec.params;
  const double a = p.at("anchor_s");
  EnvironmentalConditions& c = env.conditions;
  c.wetness = p.at("wetness");
  Rng layout = layout_rng(spec);
  switch (spec.type) {
    case IllusionType::SunlightReflection:
      c.sun_luminance = p.at("sun_luminance");
      c.sun_elevation = p.at("sun_elevation");
      c.sun_azimuth = rf.heading(a) + layout.uniform(-0.35, 0.35);
      break;
    case IllusionType::StreetlightReflection: {
      c.sun_luminance = p.at("sun_luminance");
      c.streetlights_on = true;
      c.time_tag = "night";
      const Color tint = layout.bernoulli(0.5) ? Color{1.0, 1.0, 0.95} : Color{1.0, 0.8, 0.45};
      for (int i = 0; i < static_cast<int>(p.at("count")); ++i) {
        Rng rng(item_seed(spec, "lamp", i));
        const double side = i % 2 == 0 ? 1.0 : -1.0;
        const double d = side > 0 ? rf.left_edge() + rng.uniform(0.0, 0.6) : rf.right_edge() - rng.uniform(0.0, 0.6);
        const double s = a + 6.0 + 7.0 * i + rng.uniform(-1.5, 1.5);
        c.light_sources.push_back({LightKind::Streetlight, rf.at(s, d, 8.0), p.at("luminance"), tint});
      }
      break;
    }
    case IllusionType::VehicleReflection: {
      for (int i = 0; i < static_cast<int>(p.at("count")); ++i) {
        Rng rng(item_seed(spec, "vehicle_glint", i));
        const double d = rf.ego_boundary(rng) + rng.uniform(-1.2, 1.2);
        const double s = a + 8.0 + 6.0 * i + rng.uniform(-1.5, 1.5);
        c.light_sources.push_back(
            {LightKind::VehicleSurface, rf.at(s, d, rng.uniform(0.8, 1.3)), p.at("luminance"), {0.95, 0.96, 1.0}});
      }
      break;
    }
    default:
      break;
  }
}

}  // namespace

const std::array<IllusionType, kIllusionTypeCount>& all_illusion_types() {
  static const std::array<IllusionType, kIllusionTypeCount> types = [] {
    std::array<IllusionType, kIllusionTypeCount> out{};
    for (std::size_t i = 0; i < kTypes.size(); ++i) out[i] = kTypes[i].type;
    return out;
  }();
  return types;
}

const std::array<IllusionCategory, 4>& all_categories() {
  static const std::array<IllusionCategory, 4> cats = {IllusionCategory::RoadDamage, IllusionCategory::TrafficObstruction,
                                                       IllusionCategory::Shadow, IllusionCategory::Reflection};
  return cats;
}

IllusionCategory category_of(IllusionType t) { return info(t).category; }
std::string to_string(IllusionType t) { return info(t).name; }
std::string to_string(IllusionCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

IllusionType parse_illusion_type(const std::string& name) {
  for (const TypeInfo& t : kTypes) {
    if (name == t.name) return t.type;
  }
  throw ValidationError("unknown illusion type '" + name + "'");
}

IllusionCategory parse_category(const std::string& name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (name == kCategoryNames[i]) return static_cast<IllusionCategory>(i);
  }
  throw ValidationError("unknown illusion category '" + name + "'");
}

IllusionParams resolve_params(IllusionType type, int severity, std::uint64_t seed, double anchor_s) {
  if (severity < 1 || severity > kMaxSeverity) {
    throw ValidationError("severity " + std::to_string(severity) + " outside [1,5]");
  }
  (void)seed;  // placement draws happen in apply from the same seed
  const int s = severity;
  IllusionParams p{{"anchor_s", anchor_s}};
  auto shadow_sun = [&] {
    p["sun_luminance"] = lerp(0.55, 1.0, s);
    p["sun_elevation"] = lerp(0.95, 0.35, s);
    p["shadow_reach"] = std::cos(p["sun_elevation"]) / std::sin(p["sun_elevation"]);
  };
  switch (type) {
    case IllusionType::RoadCrack:
      p["count"] = lerp_count(1, 6, s);
      p["opacity"] = lerp(0.15, 0.75, s);
      p["width"] = lerp(0.06, 0.14, s);
      p["length"] = lerp(4.0, 18.0, s);
      break;
    case IllusionType::RoadRepair:
      p["count"] = lerp_count(1, 4, s);
      p["opacity"] = lerp(0.55, 1.0, s);
      p["patch_length"] = lerp(2.0, 8.0, s);
      p["patch_width"] = lerp(0.8, 2.5, s);
      break;
    case IllusionType::TireMarks:
      p["pairs"] = lerp_count(1, 4, s);
      p["opacity"] = lerp(0.3, 0.85, s);
      p["length"] = lerp(2.0, 15.0, s);
      break;
    case IllusionType::GuardRail:
      p["segments"] = lerp_count(1, 6, s);
      p["segment_length"] = lerp(6.0, 16.0, s);
      break;
    case IllusionType::Pedestrian:
    case IllusionType::Vehicle:
    case IllusionType::Bicycle:
      p["count"] = lerp_count(1, 8, s);
      p["nearest_distance"] = lerp(40.0, 10.0, s);
      break;
    case IllusionType::StreetlightShadow:
      shadow_sun();
      p["count"] = lerp_count(1, 6, s);
      break;
    case IllusionType::FenceShadow:
      shadow_sun();
      p["extent"] = lerp(15.0, 60.0, s);
      p["height"] = lerp(1.5, 2.5, s);
      break;
    case IllusionType::RailShadow:
      shadow_sun();
      p["extent"] = lerp(15.0, 60.0, s);
      p["height"] = lerp(1.0, 1.4, s);
      break;
    case IllusionType::WireShadow:
      shadow_sun();
      p["count"] = lerp_count(1, 3, s);
      p["extent"] = lerp(20.0, 60.0, s);
      break;
    case IllusionType::SunlightReflection:
      p["wetness"] = lerp(0.2, 1.0, s);
      p["sun_luminance"] = lerp(0.8, 1.0, s);
      p["sun_elevation"] = lerp(0.6, 0.15, s);
      p["glare"] = 1.2 - p["sun_elevation"];
      break;
    case IllusionType::StreetlightReflection:
      p["wetness"] = lerp(0.2, 1.0, s);
      p["sun_luminance"] = 0.12;
      p["count"] = lerp_count(2, 6, s);
      p["luminance"] = lerp(0.5, 1.0, s);
      break;
    case IllusionType::VehicleReflection:
      p["wetness"] = lerp(0.2, 1.0, s);
      p["count"] = lerp_count(1, 4, s);
      p["luminance"] = lerp(0.6, 1.0, s);
      break;
  }
  return p;
}

std::vector<std::string> magnitude_params(IllusionType type) {
  switch (type) {
    case IllusionType::RoadCrack: return {"count", "opacity", "width", "length"};
    case IllusionType::RoadRepair: return {"count", "opacity", "patch_length", "patch_width"};
    case IllusionType::TireMarks: return {"pairs", "opacity", "length"};
    case IllusionType::GuardRail: return {"segments", "segment_length"};
    case IllusionType::Pedestrian:
    case IllusionType::Vehicle:
    case IllusionType::Bicycle: return {"count"};
    case IllusionType::StreetlightShadow: return {"sun_luminance", "shadow_reach", "count"};
    case IllusionType::FenceShadow:
    case IllusionType::RailShadow: return {"sun_luminance", "shadow_reach", "extent", "height"};
    case IllusionType::WireShadow: return {"sun_luminance", "shadow_reach", "count", "extent"};
    case IllusionType::SunlightReflection: return {"wetness", "sun_luminance", "glare"};
    case IllusionType::StreetlightReflection:
    case IllusionType::VehicleReflection: return {"wetness", "count", "luminance"};
  }
  return {};
}

IllusionSpec make_spec(IllusionType type, int severity, std::uint64_t seed, double anchor_s) {
  IllusionSpec spec{category_of(type), type, severity, seed, resolve_params(type, severity, seed, anchor_s)};
  spec.validate();
  return spec;
}

void IllusionSpec::validate() const {
  if (category_of(type) != category) {
    throw ValidationError("illusion " + to_string(type) + " does not belong to category " + to_string(category));
  }
  if (severity < 1 || severity > kMaxSeverity) throw ValidationError("severity outside [1,5]");
  const IllusionParams expected = resolve_params(type, severity, seed, 0.0);
  for (const auto& [key, value] : expected) {
    (void)value;
    const auto it = params.find(key);
    if (it == params.end() || !std::isfinite(it->second)) {
      throw ValidationError("illusion " + to_string(type) + " is missing parameter '" + key + "'");
    }
  }
}

bool applicable(IllusionType type, RoadType road) {
  struct Exclusion {
    IllusionType type;
    RoadType road;
  };
  static constexpr std::array<Exclusion, 4> table = {{
      {IllusionType::GuardRail, RoadType::RoundaboutArc},
      {IllusionType::GuardRail, RoadType::TJunction},
      {IllusionType::GuardRail, RoadType::Crossroad},
      {IllusionType::RailShadow, RoadType::RoundaboutArc},
  }};
  return std::none_of(table.begin(), table.end(), [&](const Exclusion& e) { return e.type == type && e.road == road; });
}

Environment apply(const Environment& env, const IllusionSpec& spec) {
  spec.validate();
  if (!applicable(spec.type, env.road.road_type)) {
    throw InapplicableError(to_string(spec.type) + " is not applicable to road type " + to_string(env.road.road_type));
  }
  Environment out = env;
  switch (spec.type) {
    case IllusionType::RoadCrack: add_cracks(out, spec); break;
    case IllusionType::RoadRepair: add_repairs(out, spec); break;
    case IllusionType::TireMarks: add_tire_marks(out, spec); break;
    case IllusionType::GuardRail: add_guard_rails(out, spec); break;
    case IllusionType::Pedestrian:
    case IllusionType::Vehicle:
    case IllusionType::Bicycle: add_participants(out, spec); break;
    case IllusionType::StreetlightShadow:
    case IllusionType::FenceShadow:
    case IllusionType::RailShadow:
    case IllusionType::WireShadow: add_shadow_casters(out, spec); break;
    case IllusionType::SunlightReflection:
    case IllusionType::StreetlightReflection:
    case IllusionType::VehicleReflection: add_reflections(out, spec); break;
  }
  return out;
}

BinaryMap perturbation_mask(const Image& clean, const Image& perturbed, int tolerance) {
  if (clean.size() != perturbed.size()) throw ValidationError("perturbation_mask: image dimensions differ");
  BinaryMap mask(clean.width(), clean.height());
  for (int y = 0; y < clean.height(); ++y) {
    for (int x = 0; x < clean.width(); ++x) {
      const Rgb8 a = clean.at(x, y);
      const Rgb8 b = perturbed.at(x, y);
      const int diff = std::max({std::abs(a.r - b.r), std::abs(a.g - b.g), std::abs(a.b - b.b)});
      mask.at(x, y) = diff > tolerance ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace lanebench
