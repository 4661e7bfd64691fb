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

#include "lanebench/simloop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lanebench/metrics.hpp"

namespace lanebench {
namespace {

// x of a row-anchor lane at a fractional row, interpolated between the two
// bracketing samples when both are present.
std::optional<double> lane_x_at(const std::vector<int>& rows, const std::vector<double>& lane, double row) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double r0 = rows[i - 1] + 0.5, r1 = rows[i] + 0.5;
    if (row < r0 || row > r1) continue;
    if (lane[i - 1] == kAbsentLane || lane[i] == kAbsentLane) return std::nullopt;
    const double u = (row - r0) / (r1 - r0);
    return lane[i - 1] + (lane[i] - lane[i - 1]) * u;
  }
  return std::nullopt;
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = (b - a).cross(c - a), d2 = (b - a).cross(d - a);
  const double d3 = (d - c).cross(a - c), d4 = (d - c).cross(b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  auto on = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  return (d1 == 0 && on(a, b, c)) || (d2 == 0 && on(a, b, d)) || (d3 == 0 && on(c, d, a)) || (d4 == 0 && on(c, d, b));
}

}  // namespace

void SimParams::validate() const {
  if (!(dt > 0.0)) throw ValidationError("sim.dt must be positive");
  if (!(wheelbase > 0.0)) throw ValidationError("sim.wheelbase must be positive");
  if (!(lookahead > 0.0)) throw ValidationError("sim.lookahead must be positive");
  if (!(speed >= 0.0)) throw ValidationError("sim.speed must be non-negative");
  if (!(duration > 0.0)) throw ValidationError("sim.duration must be positive");
  if (!(window > 0.0 && window <= duration)) throw ValidationError("sim.window must be in (0, duration]");
  if (!(deviation_threshold > 0.0)) throw ValidationError("sim.deviation_threshold must be positive");
  if (runs < 1) throw ValidationError("sim.runs must be at least 1");
  if (!(start_min >= 0.0 && start_max >= start_min)) throw ValidationError("sim.start_min/start_max out of order");
}

VehicleState step(const VehicleState& s, double steering, double dt, double wheelbase) {
  if (!(std::abs(steering) < 0.5 * kPi)) throw ValidationError("step: |steering| must be below pi/2");
  if (!(dt > 0.0)) throw ValidationError("step: dt must be positive");
  VehicleState out = s;
  const double omega = s.speed / wheelbase * std::tan(steering);
  const double dh = omega * dt;
  if (std::abs(dh) < 1e-12) {
    out.x += s.speed * std::cos(s.heading) * dt;
    out.y += s.speed * std::sin(s.heading) * dt;
  } else {
    // Exact integration of the constant-steering arc.
    const double r = s.speed / omega;
    out.heading = s.heading + dh;
    out.x += r * (std::sin(out.heading) - std::sin(s.heading));
    out.y -= r * (std::cos(out.heading) - std::cos(s.heading));
  }
  return out;
}

VehiclePose camera_pose(const VehicleState& s, double camera_offset) {
  return {s.x + camera_offset * std::cos(s.heading), s.y + camera_offset * std::sin(s.heading), s.heading};
}

std::optional<Vec2> ground_point(const CameraModel& camera, Vec2 pixel) {
  const CameraFrame f = camera_frame(camera, VehiclePose{});
  const Vec3 ray = f.ray(pixel.x, pixel.y);
  if (!(ray.z < 0.0)) return std::nullopt;
  const double t = -f.origin.z / ray.z;
  return Vec2{t * ray.x, t * ray.y};
}

double pure_pursuit(const LanePrediction& prediction, const CameraModel& camera, double lookahead, double wheelbase,
                    double camera_offset, double lane_width, double previous) {
  if (!(lookahead > 0.0)) throw ValidationError("pure_pursuit: lookahead must be positive");
  const auto target_px = project(camera, VehiclePose{}, {lookahead, 0.0, 0.0});
  if (!target_px || prediction.empty()) return previous;
  const double row = target_px->y;
  std::optional<double> left, right;
  for (const auto& lane : prediction.lanes) {
    const auto x = lane_x_at(prediction.h_samples, lane, row);
    if (!x) continue;
    if (*x < camera.cx()) {
      if (!left || *x > *left) left = x;
    } else if (!right || *x < *right) {
      right = x;
    }
  }
  std::optional<Vec2> gl, gr;
  if (left) gl = ground_point(camera, {*left, row});
  if (right) gr = ground_point(camera, {*right, row});
  Vec2 target;
  if (gl && gr) {
    target = (*gl + *gr) * 0.5;
  } else if (gl) {
    target = *gl - Vec2{0.0, 0.5 * lane_width};
  } else if (gr) {
    target = *gr + Vec2{0.0, 0.5 * lane_width};
  } else {
    return previous;
  }
  const double alpha = std::atan2(target.y, camera_offset + target.x);
  return std::atan(2.0 * wheelbase * std::sin(alpha) / lookahead);
}

LanePrediction DetectorLaneSource::lanes(const Environment& env, const CameraModel& camera, const VehiclePose& pose,
                                         double t) {
  const RenderResult frame = render(env, camera, pose, t);
  return detect(frame.image, config_, camera);
}

LanePrediction ScriptedLaneSource::lanes(const Environment& env, const CameraModel& camera, const VehiclePose& pose,
                                         double) {
  const LaneAnnotation ann = ground_truth(env, camera, pose, default_h_samples(camera), offset_);
  LanePrediction p;
  p.h_samples = ann.h_samples;
  for (const auto& lane : ann.lanes) {
    if (std::all_of(lane.begin(), lane.end(), [](double x) { return x == kAbsentLane; })) continue;
    p.lanes.push_back(lane);
    p.confidence.push_back(1.0);
  }
  return p;
}

void EpisodeSpec::validate() const {
  env.validate();
  if (!(duration > 0.0)) throw ValidationError("episode duration must be positive");
  if (!(dt > 0.0)) throw ValidationError("episode dt must be positive");
}

bool SimTrace::operator==(const SimTrace& o) const {
  if (exited != o.exited || samples.size() != o.samples.size()) return false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const TraceSample &a = samples[i], &b = o.samples[i];
    if (a.t != b.t || !(a.state == b.state) || a.deviation != b.deviation || a.steering != b.steering ||
        !(a.prediction == b.prediction)) {
      return false;
    }
  }
  return true;
}

SimTrace run_episode(const EpisodeSpec& spec, LaneSource& source, const CameraModel& camera, const SimParams& params) {
  spec.validate();
  params.validate();
  const auto offsets = boundary_offsets(spec.env.road);
  const double lane_width = spec.env.road.lane_width;
  const double left_edge = offsets.front() + spec.env.geometry.shoulder;
  const double right_edge = offsets.back() - spec.env.geometry.shoulder;

  const VehiclePose start = pose_on_road(spec.env, spec.start_s, spec.start_offset);
  VehicleState state{start.x, start.y, start.heading, params.speed};
  SimTrace trace;
  double steering = 0.0;
  const int steps = static_cast<int>(std::lround(spec.duration / spec.dt));
  for (int i = 0; i <= steps; ++i) {
    const double t = i * spec.dt;
    const RoadCoord rc = spec.env.geometry.locate({state.x, state.y});
    const VehiclePose cam = camera_pose(state, params.camera_offset);
    const RoadCoord cc = spec.env.geometry.locate({cam.x, cam.y});
    const double end = spec.env.geometry.length() - params.lookahead;
    if (rc.s <= 0.0 || cc.s >= end || cc.d > left_edge || cc.d < right_edge) {
      trace.exited = true;
      break;
    }
    TraceSample sample;
    sample.t = t;
    sample.state = state;
    sample.deviation = rc.d;
    sample.prediction = source.lanes(spec.env, camera, cam, t);
    steering = pure_pursuit(sample.prediction, camera, params.lookahead, params.wheelbase, params.camera_offset, lane_width,
                            steering);
    sample.steering = steering;
    trace.samples.push_back(std::move(sample));
    if (i < steps) state = step(state, steering, spec.dt, params.wheelbase);
  }
  return trace;
}

AsrResult asr(const std::vector<SimTrace>& clean, const std::vector<SimTrace>& perturbed, double deviation_threshold,
              double window) {
  if (clean.empty() || perturbed.empty()) throw ValidationError("asr: traces must be nonempty");
  if (clean.size() != 1 && clean.size() != perturbed.size()) throw ValidationError("asr: clean and perturbed runs differ");
  AsrResult r;
  r.runs = static_cast<int>(perturbed.size());
  std::size_t frames = 0, frame_hits = 0;
  for (std::size_t k = 0; k < perturbed.size(); ++k) {
    const SimTrace& p = perturbed[k];
    const SimTrace& c = clean.size() == 1 ? clean[0] : clean[k];
    if (p.samples.empty() || c.samples.empty()) throw ValidationError("asr: empty trace");
    if (window > p.duration() + 1e-9 || window > c.duration() + 1e-9) {
      throw ValidationError("asr: window longer than the trace");
    }
    bool hit = false;
    for (std::size_t i = 0; i < p.samples.size() && p.samples[i].t <= window + 1e-9; ++i) {
      const bool clean_ok = i >= c.samples.size() || std::abs(c.samples[i].deviation) <= deviation_threshold;
      const bool over = std::abs(p.samples[i].deviation) > deviation_threshold && clean_ok;
      ++frames;
      if (over) {
        ++frame_hits;
        hit = true;
      }
    }
    if (hit) ++r.successes;
  }
  r.run_rate = static_cast<double>(r.successes) / r.runs;
  r.frame_rate = frames == 0 ? 0.0 : static_cast<double>(frame_hits) / static_cast<double>(frames);
  return r;
}

bool apollo_stop(const std::vector<LanePrediction>& predictions, const CameraModel& camera, double horizon) {
  const Vec2 path_a{0.0, 0.0}, path_b{horizon, 0.0};
  for (const LanePrediction& p : predictions) {
    for (const auto& lane : p.lanes) {
      std::optional<Vec2> prev;
      for (std::size_t r = 0; r < p.h_samples.size(); ++r) {
        std::optional<Vec2> g;
        if (lane[r] != kAbsentLane) g = ground_point(camera, {lane[r], p.h_samples[r] + 0.5});
        if (g && prev && segments_cross(*prev, *g, path_a, path_b)) return true;
        prev = g;
      }
    }
  }
  return false;
}

bool apollo_stop(const SimTrace& trace, const CameraModel& camera, double horizon) {
  std::vector<LanePrediction> preds;
  for (const TraceSample& s : trace.samples) preds.push_back(s.prediction);
  return apollo_stop(preds, camera, horizon);
}

void write_trace_csv(const std::filesystem::path& file, const SimTrace& trace) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  out << "t,x,y,heading,deviation\n";
  for (const TraceSample& s : trace.samples) {
    out << format_double(s.t) << ',' << format_double(s.state.x) << ',' << format_double(s.state.y) << ','
        << format_double(s.state.heading) << ',' << format_double(s.deviation) << '\n';
  }
}

Environment sim_environment(RoadType road, std::uint64_t seed) {
  if (road != RoadType::Straight && road != RoadType::GentleCurve) {
    throw ValidationError("closed-loop cases use straight or gentle_curve roads");
  }
  return build_case(RoadSpec::defaults(road), EnvironmentalConditions{}, seed);
}

}  // namespace lanebench
