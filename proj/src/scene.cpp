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

#include "lanebench/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "lanebench/lighting.hpp"
#include "lanebench/raster.hpp"

namespace lanebench {
namespace {

constexpr double kMaxRange = 250.0;
constexpr double kDashPeriod = 12.0;
constexpr double kDashLength = 3.0;

constexpr Color kAsphalt{0.33, 0.33, 0.34};
constexpr Color kGrass{0.28, 0.38, 0.20};
constexpr Color kWhitePaint{0.92, 0.92, 0.90};
constexpr Color kYellowPaint{0.90, 0.72, 0.15};
constexpr Color kSkyTop{0.45, 0.62, 0.85};
constexpr Color kSkyHorizon{0.75, 0.82, 0.90};
constexpr Color kHaze{0.66, 0.70, 0.74};

Vec3 cross(Vec3 a, Vec3 b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }

// Daytime exposure is held at the default sun level, so a stronger sun only
// deepens shadows and glare. Night scenes follow the sun term directly.
double exposure_luminance(const EnvironmentalConditions& c) {
  return c.time_tag == "night" ? c.sun_luminance : EnvironmentalConditions{}.sun_luminance;
}

double illumination(const EnvironmentalConditions& c) { return 0.3 + 0.7 * exposure_luminance(c); }

// Height of the road surface under a world point.
double surface_z(const RoadGeometry& g, Vec2 p) { return g.grades().empty() ? 0.0 : g.elevation(p.x); }

std::optional<Vec3> intersect_ground(const Vec3& o, const Vec3& dir, const RoadGeometry& g) {
  const auto& grades = g.grades();
  if (grades.empty()) {
    if (dir.z >= 0.0) return std::nullopt;
    const double t = -o.z / dir.z;
    return o + dir * t;
  }
  // Piecewise planes along x; the first piece is flat at z = 0.
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = grades.size();
  for (std::size_t i = 0; i <= n; ++i) {
    const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : grades[i - 1].start_s;
    const double hi = i == n ? std::numeric_limits<double>::infinity() : grades[i].start_s;
    const double grade = i == 0 ? 0.0 : grades[i - 1].grade;
    const double x0 = i == 0 ? 0.0 : lo;
    const double z0 = i == 0 ? 0.0 : g.elevation(lo);
    const double denom = dir.z - grade * dir.x;
    if (denom == 0.0) continue;
    const double t = (z0 + grade * (o.x - x0) - o.z) / denom;
    if (!(t > 0.0) || t >= best) continue;
    const double x = o.x + t * dir.x;
    if (x >= lo && x < hi) best = t;
  }
  if (!std::isfinite(best)) return std::nullopt;
  return o + dir * best;
}

struct Stripe {
  double center = 0.0;
  double half_width = 0.0;
  bool yellow = false;
  bool dashed = false;
};

struct Box2 {
  double x0, y0, x1, y1;
  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

Box2 bounds(const std::vector<Vec2>& pts, double pad) {
  Box2 b{1e300, 1e300, -1e300, -1e300};
  for (const Vec2& p : pts) {
    b.x0 = std::min(b.x0, p.x - pad);
    b.y0 = std::min(b.y0, p.y - pad);
    b.x1 = std::max(b.x1, p.x + pad);
    b.y1 = std::max(b.y1, p.y + pad);
  }
  return b;
}

bool inside_polygon(Vec2 p, const std::vector<Vec2>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    if ((poly[i].y > p.y) != (poly[j].y > p.y) &&
        p.x < (poly[j].x - poly[i].x) * (p.y - poly[i].y) / (poly[j].y - poly[i].y) + poly[i].x) {
      in = !in;
    }
  }
  return in;
}

struct SurfaceFeature {
  Box2 box;
  std::vector<Vec2> pts;
  bool polygon = false;
  double half_width = 0.0;
  Color color;
  double opacity = 1.0;

  bool covers(Vec2 p) const {
    if (!box.contains(p)) return false;
    if (polygon) return inside_polygon(p, pts);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (segment_distance(p, pts[i - 1], pts[i]) <= half_width) return true;
    }
    return false;
  }
};

struct BandEntry {
  Box2 box;
  ShadowBand band;
};

bool is_surface_kind(FacilityKind k) {
  return k == FacilityKind::Crack || k == FacilityKind::RepairPatch || k == FacilityKind::TireMark;
}

// Everything the per-pixel ground shader needs, precomputed once per frame.
class GroundShader {
 public:
  GroundShader(const Environment& env, const CameraModel& camera, const VehiclePose& pose)
      : env_(env), camera_(camera), cam_(camera_frame(camera, pose, &env.geometry)) {
    const auto offsets = boundary_offsets(env.road);
    left_edge_ = offsets.front() + env.geometry.shoulder;
    right_edge_ = offsets.back() - env.geometry.shoulder;
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      const LineStyle style = env.road.boundary_styles[k];
      if (!is_painted(style)) continue;
      const bool yellow = is_yellow(style);
      const bool dashed = is_dashed(style);
      if (is_double(style)) {
        stripes_.push_back({offsets[k] + 0.12, 0.06, yellow, dashed});
        stripes_.push_back({offsets[k] - 0.12, 0.06, yellow, dashed});
      } else {
        stripes_.push_back({offsets[k], 0.075, yellow, dashed});
      }
    }
    for (const StaticFacility& f : env.statics) {
      if (!is_surface_kind(f.kind)) continue;
      SurfaceFeature sf;
      for (const Vec3& p : f.points) sf.pts.push_back(p.xy());
      sf.polygon = f.shape == Shape::Polygon;
      sf.half_width = 0.5 * f.stroke_width;
      sf.box = bounds(sf.pts, sf.half_width);
      sf.color = f.appearance.base;
      sf.opacity = f.appearance.opacity;
      surface_.push_back(std::move(sf));
    }
    auto add_shadows = [&](const StaticFacility& f) {
      for (const ShadowBand& b : shadow_project(env.conditions, f)) {
        const auto poly = b.polygon();
        bands_.push_back({bounds({poly.begin(), poly.end()}, 0.0), b});
      }
    };
    for (const StaticFacility& f : env.statics) add_shadows(f);
    for (const StaticFacility& f : env.conditions.shadow_casters) add_shadows(f);
    reflections_ = reflection_regions(env, camera, pose);
    illum_ = illumination(env.conditions);
  }

  Color sky(double row) const {
    const double horizon = camera_.horizon_row();
    const double t = std::clamp(row / std::max(1.0, horizon), 0.0, 1.0);
    return mix(kSkyTop, kSkyHorizon, t) * (0.35 + 0.65 * exposure_luminance(env_.conditions));
  }

  // Colour at one sub-pixel sample plus the distance (meters) from the hit
  // point to the nearest stripe edge, used to decide on supersampling.
  Color shade(double col, double row, double* edge_margin) const {
    const Vec3 dir = cam_.ray(col, row);
    const auto hit = intersect_ground(cam_.origin, dir, env_.geometry);
    if (edge_margin) *edge_margin = std::numeric_limits<double>::infinity();
    if (!hit) return sky(row);
    const Vec3 rel = *hit - cam_.origin;
    const double range = std::hypot(rel.x, rel.y);
    if (range > kMaxRange) return mix(sky(row), kHaze, 0.5);

    const Vec2 p = hit->xy();
    const RoadCoord rc = env_.geometry.locate(p);
    const auto& g = env_.geometry;
    double right_edge = right_edge_;
    if (g.merge && rc.s < g.merge->end_s) {
      const double frac = rc.s <= g.merge->start_s ? 1.0 : (g.merge->end_s - rc.s) / (g.merge->end_s - g.merge->start_s);
      right_edge -= g.merge->width * frac;
    }
    bool on_road = rc.d <= left_edge_ && rc.d >= right_edge;
    bool in_crossing = false;
    if (g.crossing && std::abs(rc.s - g.crossing->center_s) < 0.5 * g.crossing->width) {
      in_crossing = true;
      if ((g.crossing->left && rc.d > 0.0) || (g.crossing->right && rc.d < 0.0)) on_road = true;
    }

    Color c = on_road ? kAsphalt * (1.0 - 0.3 * env_.conditions.wetness) : kGrass;
    if (on_road && !in_crossing) {
      const bool dash_on = std::fmod(rc.s + g.dash_phase + 1000.0 * kDashPeriod, kDashPeriod) < kDashLength;
      for (const Stripe& st : stripes_) {
        const double off = std::abs(rc.d - st.center);
        if (edge_margin) *edge_margin = std::min(*edge_margin, std::abs(off - st.half_width));
        if (off <= st.half_width && (!st.dashed || dash_on)) {
          c = (st.yellow ? kYellowPaint : kWhitePaint) * (1.0 - 0.1 * env_.conditions.wetness);
        }
      }
    }
    for (const SurfaceFeature& sf : surface_) {
      if (sf.covers(p)) c = mix(c, sf.color, sf.opacity);
    }
    double dark = 1.0, bright = 1.0;
    for (const BandEntry& be : bands_) {
      if (!be.box.contains(p) || !be.band.contains(p)) continue;
      if (be.band.factor < 1.0) {
        dark = std::min(dark, be.band.factor);
      } else {
        bright = std::max(bright, be.band.factor);
      }
    }
    c = c * (illum_ * (dark < 1.0 ? dark : bright));
    if (on_road) {
      for (const ReflectionRegion& r : reflections_) {
        const double w = r.weight(col, row);
        if (w > 0.0) c = mix(c, r.tint, std::min(1.0, w));
      }
    }
    if (range > 120.0) c = mix(c, kHaze * illum_, std::min(0.6, (range - 120.0) / 130.0 * 0.6));
    if (edge_margin) *edge_margin /= std::max(1e-9, range / cam_.focal);
    return c;
  }

  Rgb8 pixel(int x, int y) const {
    double margin = 0.0;
    const Color center = shade(x + 0.5, y + 0.5, &margin);
    // 2x2 supersampling where a stripe edge falls within ~1.5 px.
    if (margin > 1.5) return to_rgb8(center);
    Color acc;
    for (double dy : {0.25, 0.75}) {
      for (double dx : {0.25, 0.75}) acc = acc + shade(x + dx, y + dy, nullptr);
    }
    return to_rgb8(acc * 0.25);
  }

  const CameraFrame& camera() const { return cam_; }
  double illum() const { return illum_; }

 private:
  const Environment& env_;
  const CameraModel& camera_;
  CameraFrame cam_;
  double left_edge_ = 0.0;
  double right_edge_ = 0.0;
  std::vector<Stripe> stripes_;
  std::vector<SurfaceFeature> surface_;
  std::vector<BandEntry> bands_;
  std::vector<ReflectionRegion> reflections_;
  double illum_ = 1.0;
};

// A screen-space convex polygon drawn in painter's order.
struct Primitive {
  double depth = 0.0;
  std::vector<Vec2> polygon;
  Color color;
};

constexpr double kNearPlane = 0.3;

// Clips a polygon (world space) against the camera near plane and projects it.
std::vector<Vec2> clip_and_project(const CameraFrame& cam, const std::vector<Vec3>& poly) {
  std::vector<Vec3> clipped;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec3 a = poly[i];
    const Vec3 b = poly[(i + 1) % poly.size()];
    const double da = (a - cam.origin).dot(cam.forward) - kNearPlane;
    const double db = (b - cam.origin).dot(cam.forward) - kNearPlane;
    if (da >= 0.0) clipped.push_back(a);
    if ((da >= 0.0) != (db >= 0.0)) clipped.push_back(a + (b - a) * (da / (da - db)));
  }
  std::vector<Vec2> out;
  for (const Vec3& p : clipped) {
    if (auto q = cam.project(p)) out.push_back(*q);
  }
  return out;
}

void add_part(std::vector<Primitive>& prims, const CameraFrame& cam, const RoadGeometry& g, const OccluderPart& part,
              Color color) {
  Vec3 a = part.a;
  Vec3 b = part.b;
  a.z += surface_z(g, a.xy());
  b.z += surface_z(g, b.xy());
  double da = (a - cam.origin).dot(cam.forward);
  double db = (b - cam.origin).dot(cam.forward);
  if (da < kNearPlane && db < kNearPlane) return;
  if (da < kNearPlane) {
    a = a + (b - a) * ((kNearPlane - da) / (db - da));
    da = kNearPlane;
  } else if (db < kNearPlane) {
    b = b + (a - b) * ((kNearPlane - db) / (da - db));
    db = kNearPlane;
  }
  const auto pa = cam.project(a);
  const auto pb = cam.project(b);
  if (!pa || !pb) return;
  Vec2 dir = *pb - *pa;
  const double n = dir.norm();
  dir = n > 1e-9 ? dir * (1.0 / n) : Vec2{0.0, 1.0};
  const Vec2 perp{-dir.y, dir.x};
  const double ha = std::max(0.5, cam.focal * part.thickness * 0.5 / da);
  const double hb = std::max(0.5, cam.focal * part.thickness * 0.5 / db);
  prims.push_back({std::max(da, db), {*pa + perp * ha, *pb + perp * hb, *pb - perp * hb, *pa - perp * ha}, color});
}

void add_box(std::vector<Primitive>& prims, const CameraFrame& cam, const RoadGeometry& g, const DynamicObject& obj,
             double t, const Vec3& sun, double illum) {
  const TimedPose tp = obj.pose_at(t);
  const Vec2 fwd{std::cos(tp.heading), std::sin(tp.heading)};
  const Vec2 left{-fwd.y, fwd.x};
  const double hl = 0.5 * obj.footprint.length;
  const double hw = 0.5 * obj.footprint.width;
  const double z0 = surface_z(g, {tp.x, tp.y});
  std::array<Vec3, 8> c;
  int i = 0;
  for (double sz : {0.0, obj.footprint.height}) {
    for (auto [sl, sw] : {std::pair{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}) {
      const Vec2 p = Vec2{tp.x, tp.y} + fwd * (sl * hl) + left * (sw * hw);
      c[i++] = {p.x, p.y, z0 + sz};
    }
  }
  const std::array<std::array<int, 4>, 5> faces = {{{4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}}};
  const Vec3 center{tp.x, tp.y, z0 + 0.5 * obj.footprint.height};
  for (const auto& face : faces) {
    Vec3 mid;
    for (int k : face) mid = mid + c[k] * 0.25;
    const Vec3 normal = cross(c[face[1]] - c[face[0]], c[face[2]] - c[face[1]]);
    Vec3 outward = normal * (1.0 / normal.norm());
    if (outward.dot(mid - center) < 0.0) outward = outward * -1.0;
    if (outward.dot(mid - cam.origin) >= 0.0) continue;  // back face
    std::vector<Vec3> poly;
    for (int k : face) poly.push_back(c[k]);
    auto screen = clip_and_project(cam, poly);
    if (screen.size() < 3) continue;
    const double shade = 0.6 + 0.4 * std::max(0.0, outward.dot(sun));
    prims.push_back({(mid - cam.origin).dot(cam.forward), std::move(screen), obj.color * (shade * illum)});
  }
}

}  // namespace

void CameraModel::validate() const {
  if (image_width <= 0 || image_height <= 0) throw ValidationError("camera image size must be positive");
  if (!(horizontal_fov > 0.0 && horizontal_fov < 180.0)) throw ValidationError("camera.horizontal_fov must be in (0,180)");
  if (!(mount_height > 0.0)) throw ValidationError("camera.mount_height must be positive");
  if (!(std::abs(pitch) < 0.5 * kPi)) throw ValidationError("camera.pitch out of range");
}

double CameraModel::focal() const { return 0.5 * image_width / std::tan(0.5 * horizontal_fov * kPi / 180.0); }

double CameraModel::horizon_row() const { return cy() - focal() * std::tan(pitch); }

CameraModel CameraModel::fast() {
  CameraModel c;
  c.image_width = 640;
  c.image_height = 360;
  return c;
}

std::string to_string(FacilityKind k) {
  static constexpr std::array<const char*, 11> names = {"road", "lane_line", "guard_rail", "fence", "streetlight", "rail",
                                                        "wire", "wall", "repair_patch", "crack", "tire_mark"};
  return names[static_cast<std::size_t>(k)];
}

std::string to_string(DynamicKind k) {
  static constexpr std::array<const char*, 3> names = {"pedestrian", "vehicle", "bicycle"};
  return names[static_cast<std::size_t>(k)];
}

void StaticFacility::validate() const {
  bool distinct = false;
  for (std::size_t i = 1; i < points.size(); ++i) distinct = distinct || !(points[i] == points[0]);
  if (points.size() < 2 || !distinct) throw ValidationError("facility " + std::to_string(id) + ": degenerate geometry");
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(appearance.reflectivity) || !unit(appearance.opacity)) {
    throw ValidationError("facility " + std::to_string(id) + ": reflectivity and opacity must be in [0,1]");
  }
}

double StaticFacility::top_height() const {
  double h = 0.0;
  for (const Vec3& p : points) h = std::max(h, p.z);
  return h;
}

void DynamicObject::validate() const {
  if (!(footprint.width > 0.0 && footprint.length > 0.0 && footprint.height > 0.0)) {
    throw ValidationError("dynamic " + std::to_string(id) + ": footprint dimensions must be positive");
  }
  if (trajectory.empty()) throw ValidationError("dynamic " + std::to_string(id) + ": empty trajectory");
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    if (!(trajectory[i].t > trajectory[i - 1].t)) {
      throw ValidationError("dynamic " + std::to_string(id) + ": trajectory timestamps must increase");
    }
  }
}

TimedPose DynamicObject::pose_at(double t) const {
  if (t <= trajectory.front().t) return trajectory.front();
  if (t >= trajectory.back().t) return trajectory.back();
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const TimedPose& a = trajectory[i - 1];
    const TimedPose& b = trajectory[i];
    if (t <= b.t) {
      const double u = (t - a.t) / (b.t - a.t);
      return {t, a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u, a.heading + (b.heading - a.heading) * u};
    }
  }
  return trajectory.back();
}

void EnvironmentalConditions::validate() const {
  if (!(sun_luminance >= 0.0 && sun_luminance <= 1.0)) throw ValidationError("conditions.sun_luminance must be in [0,1]");
  if (!(wetness >= 0.0 && wetness <= 1.0)) throw ValidationError("conditions.wetness must be in [0,1]");
  if (!(sun_elevation > 0.0 && sun_elevation <= 0.5 * kPi)) {
    throw ValidationError("conditions.sun_elevation must be in (0, pi/2]");
  }
  for (const StaticFacility& f : shadow_casters) f.validate();
}

Vec3 EnvironmentalConditions::sun_direction() const {
  return {std::cos(sun_elevation) * std::cos(sun_azimuth), std::cos(sun_elevation) * std::sin(sun_azimuth),
          std::sin(sun_elevation)};
}

void Environment::validate() const {
  road.validate();
  conditions.validate();
  const auto roads = std::count_if(statics.begin(), statics.end(), [](const StaticFacility& f) { return f.kind == FacilityKind::Road; });
  if (roads != 1) throw ValidationError("environment must contain exactly one road facility");
  const auto offsets = boundary_offsets(road);
  const double left = offsets.front() + geometry.shoulder + 1e-6;
  const double right = offsets.back() - geometry.shoulder - 1e-6;
  for (const StaticFacility& f : statics) {
    f.validate();
    if (f.kind != FacilityKind::LaneLine) continue;
    for (const Vec3& p : f.points) {
      const double d = geometry.locate(p.xy()).d;
      if (d > left || d < right) throw ValidationError("lane line " + std::to_string(f.id) + " leaves the road surface");
    }
  }
  for (const DynamicObject& o : dynamics) o.validate();
}

int Environment::next_static_id() const {
  int id = 0;
  for (const StaticFacility& f : statics) id = std::max(id, f.id);
  return id + 1;
}

void LaneAnnotation::validate(ImageSize size) const {
  for (std::size_t i = 0; i < h_samples.size(); ++i) {
    if (h_samples[i] < 0 || h_samples[i] >= size.height) throw ValidationError("h_sample outside the image");
    if (i > 0 && h_samples[i] <= h_samples[i - 1]) throw ValidationError("h_samples must be strictly increasing");
  }
  for (const auto& lane : lanes) {
    if (lane.size() != h_samples.size()) throw ValidationError("lane length differs from h_samples");
    for (double x : lane) {
      if (x == kAbsentLane) continue;
      if (!(x >= 0.0 && x < size.width)) throw ValidationError("lane x outside [0, width)");
    }
  }
}

std::vector<int> default_h_samples(const CameraModel& camera) {
  std::vector<int> rows;
  for (int r = static_cast<int>(std::ceil(0.4 * camera.image_height)); r < camera.image_height; r += 10) rows.push_back(r);
  return rows;
}

Environment build_case(const RoadSpec& road, const EnvironmentalConditions& conditions, std::uint64_t seed) {
  road.validate();
  conditions.validate();
  Environment env;
  env.road = road;
  env.conditions = conditions;
  env.geometry = make_geometry(road, seed);

  const auto offsets = boundary_offsets(road);
  const double length = env.geometry.length();
  auto sample_line = [&](double d) {
    std::vector<Vec3> pts;
    for (double s = 0.0; s <= length + 1e-9; s += 10.0) {
      const Vec2 p = env.geometry.point_at(s, d);
      pts.push_back({p.x, p.y, 0.0});
    }
    return pts;
  };
  int id = 1;
  StaticFacility surface;
  surface.id = id++;
  surface.kind = FacilityKind::Road;
  surface.points = sample_line(0.5 * (offsets.front() + offsets.back()));
  surface.stroke_width = offsets.front() - offsets.back() + 2.0 * env.geometry.shoulder;
  surface.appearance = {kAsphalt, 0.1, 1.0};
  env.statics.push_back(std::move(surface));
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const LineStyle style = road.boundary_styles[k];
    StaticFacility line;
    line.id = id++;
    line.kind = FacilityKind::LaneLine;
    line.points = sample_line(offsets[k]);
    line.stroke_width = is_double(style) ? 0.36 : 0.15;
    line.appearance = {is_yellow(style) ? kYellowPaint : kWhitePaint, 0.3, is_painted(style) ? 1.0 : 0.0};
    env.statics.push_back(std::move(line));
  }
  return env;
}

std::optional<Vec2> CameraFrame::project(Vec3 p) const {
  const Vec3 v = p - origin;
  const double depth = v.dot(forward);
  if (!(depth > 1e-9)) return std::nullopt;
  return Vec2{cx + focal * v.dot(right) / depth, cy - focal * v.dot(up) / depth};
}

Vec3 CameraFrame::ray(double col, double row) const {
  return forward + right * ((col - cx) / focal) - up * ((row - cy) / focal);
}

CameraFrame camera_frame(const CameraModel& camera, const VehiclePose& pose, const RoadGeometry* road) {
  double ground = 0.0;
  double pitch = camera.pitch;
  if (road && !road->grades().empty()) {
    ground = road->elevation(pose.x);
    pitch -= std::atan(road->grade_at(pose.x));
  }
  const double ch = std::cos(pose.heading), sh = std::sin(pose.heading);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  CameraFrame f;
  f.origin = {pose.x, pose.y, ground + camera.mount_height};
  f.forward = {cp * ch, cp * sh, -sp};
  f.right = {sh, -ch, 0.0};
  f.up = {ch * sp, sh * sp, cp};
  f.focal = camera.focal();
  f.cx = camera.cx();
  f.cy = camera.cy();
  return f;
}

std::optional<Vec2> project(const CameraModel& camera, const VehiclePose& pose, Vec3 world_point) {
  return camera_frame(camera, pose).project(world_point);
}

VehiclePose pose_on_road(const Environment& env, double s, double d, double heading_offset) {
  const Pose2 p = env.geometry.pose_at(s);
  const Vec2 q = env.geometry.point_at(s, d);
  return {q.x, q.y, p.heading + heading_offset};
}

LaneAnnotation ground_truth(const Environment& env, const CameraModel& camera, const VehiclePose& pose,
                            const std::vector<int>& h_samples, double lateral_shift) {
  const CameraFrame cam = camera_frame(camera, pose, &env.geometry);
  const double s0 = env.geometry.locate({pose.x, pose.y}).s;
  const double s_end = std::min(env.geometry.length(), s0 + kMaxRange);
  LaneAnnotation ann;
  ann.h_samples = h_samples;
  for (double d : boundary_offsets(env.road)) {
    std::vector<Vec2> pts;
    for (double s = s0 - 2.0; s <= s_end;) {
      const Vec3 w = env.geometry.point3_at(s, d + lateral_shift);
      if ((w - cam.origin).dot(cam.forward) > 0.5) {
        if (auto q = cam.project(w)) pts.push_back(*q);
      } else if (!pts.empty()) {
        break;  // the nearest visible stretch ends where the boundary swings behind the camera
      }
      s += 0.1 + 0.01 * std::abs(s - s0);
    }
    std::vector<double> xs(h_samples.size(), kAbsentLane);
    for (std::size_t r = 0; r < h_samples.size(); ++r) {
      const double yc = h_samples[r] + 0.5;
      for (std::size_t i = 1; i < pts.size(); ++i) {
        const Vec2 a = pts[i - 1];
        const Vec2 b = pts[i];
        if ((a.y - yc) * (b.y - yc) > 0.0 || a.y == b.y) continue;
        const double x = a.x + (yc - a.y) / (b.y - a.y) * (b.x - a.x);
        if (x >= 0.0 && x < camera.image_width) xs[r] = x;
        break;
      }
    }
    ann.lanes.push_back(std::move(xs));
  }
  return ann;
}

RenderResult render(const Environment& env, const CameraModel& camera, const VehiclePose& pose, double t, Exec exec) {
  camera.validate();
  const RoadCoord rc = env.geometry.locate({pose.x, pose.y});
  const auto offsets = boundary_offsets(env.road);
  if (rc.d > offsets.front() + env.geometry.shoulder || rc.d < offsets.back() - env.geometry.shoulder) {
    throw ValidationError("vehicle pose is off the road surface");
  }
  const GroundShader shader(env, camera, pose);
  Image img(camera.image_width, camera.image_height);
  const int h = camera.image_height;
  const int w = camera.image_width;
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) img.set(x, y, shader.pixel(x, y));
    }
  } else {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) img.set(x, y, shader.pixel(x, y));
    }
  }

  const CameraFrame& cam = shader.camera();
  std::vector<Primitive> prims;
  auto add_facility = [&](const StaticFacility& f) {
    for (const OccluderPart& part : occluder_parts(f)) add_part(prims, cam, env.geometry, part, f.appearance.base * shader.illum());
  };
  for (const StaticFacility& f : env.statics) add_facility(f);
  for (const StaticFacility& f : env.conditions.shadow_casters) add_facility(f);
  for (const DynamicObject& o : env.dynamics) add_box(prims, cam, env.geometry, o, t, env.conditions.sun_direction(), shader.illum());
  std::stable_sort(prims.begin(), prims.end(), [](const Primitive& a, const Primitive& b) { return a.depth > b.depth; });
  for (const Primitive& p : prims) {
    const Rgb8 px = to_rgb8(p.color);
    scan_convex_polygon(img.size(), p.polygon, [&](int x, int y) { img.set(x, y, px); });
  }

  return {std::move(img), ground_truth(env, camera, pose, default_h_samples(camera))};
}

}  // namespace lanebench
