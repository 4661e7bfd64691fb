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

#include <benchmark/benchmark.h>

#include "lanebench/detector.hpp"
#include "lanebench/kernels.hpp"
#include "lanebench/rng.hpp"
#include "lanebench/scene.hpp"

namespace {

using namespace lanebench;

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

AttentionMap random_map(int w, int h) {
  AttentionMap m(w, h);
  Rng rng(7);
  for (auto& v : m.values()) v = static_cast<float>(rng.uniform());
  return m;
}

const Image& frame() {
  static const Image image = [] {
    const Environment env = build_case(RoadSpec::defaults(RoadType::Straight), {}, 1);
    return render(env, CameraModel::fast(), pose_on_road(env, 10.0), 0.0).image;
  }();
  return image;
}

void BM_GaussianBlur(benchmark::State& state) {
  const AttentionMap m = random_map(640, 360);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur(m, 4.0, exec_of(state)));
}
BENCHMARK(BM_GaussianBlur)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LaneScore(benchmark::State& state) {
  const DetectorConfig cfg = DetectorConfig::for_camera(CameraModel::fast());
  for (auto _ : state) benchmark::DoNotOptimize(lane_score(frame(), cfg.score_params(), exec_of(state)));
}
BENCHMARK(BM_LaneScore)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Warp(benchmark::State& state) {
  const DetectorConfig cfg = DetectorConfig::for_camera(CameraModel::fast());
  const AttentionMap m = random_map(640, 360);
  for (auto _ : state) {
    benchmark::DoNotOptimize(warp_bilinear(m, cfg.birdseye_to_image(), cfg.birdseye_size, exec_of(state)));
  }
}
BENCHMARK(BM_Warp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Render(benchmark::State& state) {
  const Environment env = build_case(RoadSpec::defaults(RoadType::GentleCurve), {}, 3);
  const VehiclePose pose = pose_on_road(env, 12.0);
  for (auto _ : state) benchmark::DoNotOptimize(render(env, CameraModel::fast(), pose, 0.0, exec_of(state)));
}
BENCHMARK(BM_Render)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Detect(benchmark::State& state) {
  const CameraModel cam = CameraModel::fast();
  const DetectorConfig cfg = DetectorConfig::for_camera(cam);
  for (auto _ : state) benchmark::DoNotOptimize(detect(frame(), cfg, cam, default_h_samples(cam), exec_of(state)));
}
BENCHMARK(BM_Detect)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
