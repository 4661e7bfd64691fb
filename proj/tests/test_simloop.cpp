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

#include <doctest.h>

#include <cmath>

#include "lanebench/simloop.hpp"

using namespace lanebench;

namespace {

SimTrace trace_of(std::initializer_list<double> deviations, double dt = 0.5) {
  SimTrace t;
  int i = 0;
  for (double d : deviations) {
    TraceSample s;
    s.t = dt * i++;
    s.deviation = d;
    t.samples.push_back(s);
  }
  return t;
}

// One-lane prediction drawn straight through the given pixels.
LanePrediction lane_through(const std::vector<int>& rows, const std::vector<double>& xs) {
  return {rows, {xs}, {1.0}};
}

}  // namespace

TEST_CASE("kinematics") {
  SUBCASE("straight line") {
    const VehicleState s = step({0.0, 0.0, 0.0, 20.0}, 0.0, 0.05, 2.7);
    CHECK(s.x == doctest::Approx(1.0));
    CHECK(s.y == 0.0);
    CHECK(s.heading == 0.0);
    CHECK(s.speed == 20.0);
  }
  SUBCASE("tiny steps") {
    const VehicleState s = step({1.0, 2.0, 0.3, 20.0}, 0.1, 1e-9, 2.7);
    CHECK(s.x == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::isfinite(s.heading));
  }
  SUBCASE("constant steering follows the circle") {
    const double wb = 2.7, delta = 0.05, v = 20.0, dt = 0.05;
    const VehicleState s0{3.0, -1.0, 0.4, v};
    VehicleState s = s0;
    for (int i = 0; i < 100; ++i) s = step(s, delta, dt, wb);
    const double radius = wb / std::tan(delta);
    const double cx = s0.x - radius * std::sin(s0.heading), cy = s0.y + radius * std::cos(s0.heading);
    const double h = s0.heading + v / radius * 100 * dt;
    CHECK(std::hypot(s.x - (cx + radius * std::sin(h)), s.y - (cy - radius * std::cos(h))) <= 1e-3);
    CHECK(s.heading == doctest::Approx(h));
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(step({}, 0.5 * kPi, 0.05, 2.7), ValidationError);
    CHECK_THROWS_AS(step({}, 0.0, 0.0, 2.7), ValidationError);
  }
  CHECK(camera_pose({1.0, 1.0, 0.5 * kPi, 0.0}, 4.2).y == doctest::Approx(5.2));
}

TEST_CASE("ground_point inverts the projection of ground points") {
  const CameraModel cam = CameraModel::fast();
  for (Vec3 p : {Vec3{8.0, 1.5, 0.0}, Vec3{30.0, -3.0, 0.0}, Vec3{55.0, 0.2, 0.0}}) {
    const auto px = project(cam, {}, p);
    REQUIRE(px);
    const auto g = ground_point(cam, *px);
    REQUIRE(g);
    CHECK(g->x == doctest::Approx(p.x).epsilon(1e-9));
    CHECK(g->y == doctest::Approx(p.y).epsilon(1e-9));
  }
  CHECK_FALSE(ground_point(cam, {320.0, 10.0}));
}

TEST_CASE("pure pursuit") {
  const CameraModel cam = CameraModel::fast();
  const Environment env = sim_environment(RoadType::Straight, 1);
  const VehiclePose pose = pose_on_road(env, 30.0);
  const SimParams p;
  auto steer = [&](double shift) {
    ScriptedLaneSource src(shift);
    return pure_pursuit(src.lanes(env, cam, pose, 0.0), cam, p.lookahead, p.wheelbase, p.camera_offset, 3.7, 0.123);
  };
  CHECK(std::abs(steer(0.0)) < 1e-4);
  CHECK(steer(0.3) > 0.0);
  CHECK(steer(-0.3) < 0.0);
  CHECK(steer(0.3) == doctest::Approx(-steer(-0.3)).epsilon(1e-3));
  // alpha = atan2(y, offset + x) toward a target shifted 0.3 m left.
  const double alpha = std::atan2(0.3, p.camera_offset + p.lookahead);
  CHECK(steer(0.3) == doctest::Approx(std::atan(2.0 * p.wheelbase * std::sin(alpha) / p.lookahead)).epsilon(1e-2));
  CHECK(pure_pursuit({}, cam, p.lookahead, p.wheelbase, p.camera_offset, 3.7, 0.123) == 0.123);
  SUBCASE("single visible boundary") {
    ScriptedLaneSource src(0.0);
    LanePrediction pred = src.lanes(env, cam, pose, 0.0);
    LanePrediction right_only = pred;
    right_only.lanes = {pred.lanes[2]};
    right_only.confidence = {1.0};
    CHECK(std::abs(pure_pursuit(right_only, cam, p.lookahead, p.wheelbase, p.camera_offset, 3.7, 0.0)) < 1e-3);
  }
}

TEST_CASE("scripted offsets in closed loop") {
  const CameraModel cam = CameraModel::fast();
  SimParams params;
  EpisodeSpec spec{sim_environment(RoadType::Straight, 2), 20.0, 0.0, 5.0, 0.05};
  ScriptedLaneSource shifted(0.3);
  const SimTrace t = run_episode(spec, shifted, cam, params);
  CHECK_FALSE(t.exited);
  CHECK(t.samples.size() == 101);
  bool crossed = false;
  for (const auto& s : t.samples) crossed |= s.t <= 2.5 && std::abs(s.deviation) > 0.285;
  CHECK(crossed);

  ScriptedLaneSource clean(0.0);
  const SimTrace c = run_episode(spec, clean, cam, params);
  for (const auto& s : c.samples) CHECK(std::abs(s.deviation) < 1e-6);
  CHECK(asr({c}, {t}).run_rate == 1.0);

  ScriptedLaneSource again(0.3);
  CHECK(run_episode(spec, again, cam, params) == t);

  spec.duration = 0.0;
  CHECK_THROWS_AS(run_episode(spec, clean, cam, params), ValidationError);
}

TEST_CASE("attack success rate") {
  const SimTrace calm = trace_of({0.0, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1});
  const SimTrace late = trace_of({0.0, 0.1, 0.1, 0.1, 0.1, 0.1, 0.4});   // only at t = 3
  const SimTrace early = trace_of({0.0, 0.1, 0.3, 0.3, 0.1, 0.1, 0.1});  // t = 1 and 1.5
  const SimTrace edge = trace_of({0.0, 0.1, 0.1, 0.1, 0.1, 0.29, 0.1});  // exactly t = 2.5

  const AsrResult r = asr({calm}, {late, early, edge, calm});
  CHECK(r.successes == 2);
  CHECK(r.runs == 4);
  CHECK(r.run_rate == 0.5);
  // 6 samples within the window per run, 3 over the threshold.
  CHECK(r.frame_rate == doctest::Approx(3.0 / 24.0));

  SUBCASE("clean run already over the threshold") {
    CHECK(asr({early}, {early}).run_rate == 0.0);
    CHECK(asr({calm, early}, {early, early}).run_rate == 0.5);
  }
  SUBCASE("threshold is strict") { CHECK(asr({calm}, {trace_of({0.0, 0.285, 0.1, 0.1, 0.1, 0.1})}).run_rate == 0.0); }
  SUBCASE("errors") {
    CHECK_THROWS_AS(asr({calm}, {trace_of({0.0, 0.1})}), ValidationError);
    CHECK_THROWS_AS(asr({calm, calm}, {calm, calm, calm}), ValidationError);
    CHECK_THROWS_AS(asr({}, {calm}), ValidationError);
  }
}

TEST_CASE("stop condition") {
  const CameraModel cam = CameraModel::fast();
  const std::vector<int> rows = {250, 270, 290, 310, 330, 350};
  SUBCASE("lanes parallel to the path") {
    ScriptedLaneSource src(0.0);
    const Environment env = sim_environment(RoadType::Straight, 3);
    CHECK_FALSE(apollo_stop({src.lanes(env, cam, pose_on_road(env, 20.0), 0.0)}, cam));
  }
  SUBCASE("a lane across the path nearby") {
    // Row 330 lies a few meters ahead; the lane runs across the image there.
    CHECK(apollo_stop({lane_through({320, 330, 340}, {100.0, 320.0, 540.0})}, cam));
    CHECK(apollo_stop({lane_through(rows, {kAbsentLane, kAbsentLane, 200.0, 250.0, 400.0, 450.0})}, cam));
  }
  SUBCASE("crossing beyond the horizon distance") {
    const auto far = ground_point(cam, {320.0, 200.5});
    REQUIRE(far);
    REQUIRE(far->x > 10.0);
    CHECK_FALSE(apollo_stop({lane_through({199, 200, 201}, {100.0, 320.0, 540.0})}, cam));
  }
  SUBCASE("nothing detected") { CHECK_FALSE(apollo_stop(std::vector<LanePrediction>{LanePrediction{}}, cam)); }
}

TEST_CASE("closed-loop cases use simple roads") {
  CHECK_NOTHROW(sim_environment(RoadType::GentleCurve, 1));
  CHECK_THROWS_AS(sim_environment(RoadType::RoundaboutArc, 1), ValidationError);
  SimParams p;
  p.window = 6.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}
