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

// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails. Criteria 1, 2 and 6 render hundreds of frames and
// take several minutes on one core.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lanebench/aam.hpp"
#include "lanebench/commands.hpp"
#include "lanebench/rng.hpp"
#include "lanebench/simloop.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace lanebench;
using lanebench::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

HarnessConfig fast_config(const fs::path& out, std::uint64_t seed) {
  HarnessConfig c = default_config();
  c.camera = CameraModel::fast();
  c.output = out.string();
  c.seed = seed;
  return c;
}

// 1. Mean accuracy gap negative overall and for each category, 14 x 5 x 20.
Outcome degradation_direction() {
  TempDir dir("accept-1");
  HarnessConfig c = fast_config(dir / "out", 0);
  c.suite.cases = 4;
  c.suite.frames_per_case = 5;
  std::ostringstream sink;
  StageLog log(sink);
  cmd_generate(c, log);
  const MetricsReport r = cmd_evaluate(c, {}, log);
  bool ok = r.overall && r.overall->acc_gap < 0.0 && r.categories.size() == 4;
  std::string detail = "overall acc_gap=" + (r.overall ? num(r.overall->acc_gap) : std::string("n/a"));
  for (const SummaryRow& cat : r.categories) {
    ok = ok && cat.acc_gap < 0.0;
    detail += " " + cat.label + "=" + num(cat.acc_gap);
  }
  return {ok, detail + " (all < 0; 20 pairs per type and severity)"};
}

// 2. |gap| at severity 5 >= |gap| at severity 1 for at least 12 of 14 types,
// gaps averaged over 10 seeds.
Outcome severity_monotonicity() {
  std::map<IllusionType, double> gap1, gap5;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TempDir dir("accept-2");
    HarnessConfig c = fast_config(dir / "out", seed);
    c.suite.severities = {1, 5};
    c.suite.cases = 2;
    c.suite.frames_per_case = 5;
    c.suite.masks = false;
    std::ostringstream sink;
    StageLog log(sink);
    cmd_generate(c, log);
    const MetricsReport r = cmd_evaluate(c, {}, log);
    for (IllusionType t : all_illusion_types()) {
      gap1[t] += r.row(t, 1)->acc_gap / 10.0;
      gap5[t] += r.row(t, 5)->acc_gap / 10.0;
    }
  }
  int holds = 0;
  std::string failing;
  for (IllusionType t : all_illusion_types()) {
    if (std::abs(gap5[t]) >= std::abs(gap1[t])) {
      ++holds;
    } else {
      failing += " " + to_string(t) + "(" + num(gap1[t]) + "->" + num(gap5[t]) + ")";
    }
  }
  return {holds >= 12, std::to_string(holds) + "/14 types (require >= 12; 10 seeds x 10 pairs)" +
                           (failing.empty() ? "" : "; not monotone:" + failing)};
}

// 3. lane_f1 matching vs exhaustive enumeration, plus accuracy fixtures.
Outcome metrics_oracle() {
  std::mt19937_64 gen(2024);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); };
  const ImageSize size{160, 90};
  std::vector<int> rows;
  for (int y = 30; y < 90; y += 6) rows.push_back(y);
  auto random_lanes = [&](int n) {
    LaneAnnotation a{rows, {}};
    for (int k = 0; k < n; ++k) {
      // Lanes drawn around a few shared anchors so partial overlaps are common.
      const double x0 = 20.0 + 40.0 * std::uniform_int_distribution<int>(0, 3)(gen) + uni(-12.0, 12.0);
      const double slope = uni(-0.6, 0.6);
      std::vector<double> xs;
      for (int y : rows) {
        const double x = x0 + slope * (y - 30);
        xs.push_back(x >= 0.0 && x < size.width && uni(0.0, 1.0) > 0.1 ? x : kAbsentLane);
      }
      a.lanes.push_back(xs);
    }
    return a;
  };
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    std::uniform_int_distribution<int> count(0, 4);
    const LaneAnnotation pred = random_lanes(count(gen)), gt = random_lanes(count(gen));
    const int fast = lane_f1(pred, gt, size, 30.0, 0.5).matches;
    const int brute = lanebench::testing::brute_matching(lane_iou_matrix(pred, gt, size, 30.0), 0.5);
    agree += fast == brute;
  }

  const LaneAnnotation gt{{50, 60, 70, 80}, {{40, 45, 50, 55}, {kAbsentLane, 140, 150, 160}}};
  auto pred = [&](double dx, int drop) {
    LanePrediction p{gt.h_samples, gt.lanes, {1.0, 1.0}};
    for (auto& lane : p.lanes) {
      for (double& x : lane) x = x == kAbsentLane ? x : x + dx;
    }
    if (drop >= 0) {
      p.lanes.erase(p.lanes.begin() + drop);
      p.confidence.pop_back();
    }
    return p;
  };
  struct Fixture {
    LanePrediction p;
    double want;
  };
  const std::vector<Fixture> fixtures = {{pred(0.0, -1), 1.0},        {pred(19.999, -1), 1.0}, {pred(20.0, -1), 0.0},
                                         {pred(-25.0, -1), 0.0},      {pred(0.0, 1), 4.0 / 7.0}, {pred(0.0, 0), 3.0 / 7.0},
                                         {LanePrediction{}, 0.0}};
  int fixtures_ok = 0;
  for (const Fixture& f : fixtures) fixtures_ok += std::abs(tusimple_accuracy(f.p, gt) - f.want) <= 1e-9;
  const bool ok = agree == 1000 && fixtures_ok == static_cast<int>(fixtures.size());
  return {ok, "matching agrees on " + std::to_string(agree) + "/1000 instances (require exact); accuracy fixtures " +
                  std::to_string(fixtures_ok) + "/" + std::to_string(fixtures.size()) + " within 1e-9"};
}

// 4. Planted off-lane rectangles recovered exactly; on-lane ones excluded.
Outcome aam_extraction() {
  const AamConfig cfg;
  const Image img(320, 180);
  int exact = 0, excluded = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto off = lanebench::testing::planted_map(1000 + seed, false);
    const auto entries = extract_haa("f", img, off.gt, off.map, cfg);
    exact += entries.size() == 1 && rect_iou(entries[0].rect, off.rect) == 1.0;
    const auto on = lanebench::testing::planted_map(2000 + seed, true);
    excluded += extract_haa("f", img, on.gt, on.map, cfg).empty();
  }
  return {exact == 100 && excluded == 100, "off-lane MBR IoU = 1 in " + std::to_string(exact) +
                                               "/100; on-lane excluded in " + std::to_string(excluded) + "/100"};
}

// 5. Separable blur vs dense convolution, and mass conservation.
Outcome blur_oracle() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, worst_mass = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int w = 16 + static_cast<int>(u(gen) * 48), h = 12 + static_cast<int>(u(gen) * 36);
    const double sigma = 0.5 + 5.0 * u(gen);
    AttentionMap m(w, h);
    for (double& v : m.values()) v = u(gen);
    const AttentionMap fast = blur(m, sigma);
    const AttentionMap ref = lanebench::testing::dense_blur(m, sigma);
    double in = 0.0, out = 0.0;
    for (std::size_t k = 0; k < m.values().size(); ++k) {
      worst = std::max(worst, std::abs(fast.values()[k] - ref.values()[k]));
      in += m.values()[k];
      out += fast.values()[k];
    }
    worst_mass = std::max(worst_mass, std::abs(out - in));
  }
  return {worst <= 1e-6 && worst_mass <= 1e-6,
          "max |blur - dense| = " + num(worst) + ", max mass change = " + num(worst_mass) + " (both <= 1e-6; 50 maps)"};
}

// 6. ASR sharpness with scripted offsets, clean detector loop stability.
Outcome asr_sharpness() {
  const HarnessConfig c = fast_config("unused", 0);
  const SimParams& p = c.sim.params;
  std::vector<EpisodeSpec> straight, all;
  for (std::size_t i = 0; i < c.sim.cases.size(); ++i) {
    const Environment env = sim_environment(c.sim.cases[i].road, derive_seed(c.seed, "sim-case", i));
    for (int run = 0; run < p.runs; ++run) {
      Rng start(derive_seed(c.seed, "sim-start", i * 1000 + static_cast<std::size_t>(run)));
      EpisodeSpec spec;
      spec.env = env;
      spec.start_s = c.sim.anchor_s - start.uniform(p.start_min, p.start_max) - p.camera_offset;
      spec.duration = p.duration;
      spec.dt = p.dt;
      all.push_back(spec);
      if (c.sim.cases[i].road == RoadType::Straight) straight.push_back(spec);
    }
  }
  auto scripted = [&](double offset) {
    std::vector<SimTrace> traces;
    for (const EpisodeSpec& spec : straight) {
      ScriptedLaneSource src(offset);
      traces.push_back(run_episode(spec, src, c.camera, p));
    }
    return traces;
  };
  const auto clean = scripted(0.0);
  const double asr29 = asr(clean, scripted(0.29), p.deviation_threshold, p.window).run_rate;
  const double asr28 = asr(clean, scripted(0.28), p.deviation_threshold, p.window).run_rate;

  double worst = 0.0;
  for (const EpisodeSpec& spec : all) {
    DetectorLaneSource det(c.detector_config());
    for (const TraceSample& s : run_episode(spec, det, c.camera, p).samples) worst = std::max(worst, std::abs(s.deviation));
  }
  const bool ok = asr29 == 1.0 && asr28 == 0.0 && worst < 0.285;
  return {ok, "ASR(0.29 m)=" + num(asr29) + " ASR(0.28 m)=" + num(asr28) + " over " + std::to_string(straight.size()) +
                  " straight runs; clean detector max |deviation|=" + num(worst) + " m over " +
                  std::to_string(all.size()) + " runs (require 1, 0, < 0.285)"};
}

// 7. Constant-steering arc against the analytic circle.
Outcome kinematics() {
  double worst = 0.0;
  for (double delta : {-0.2, -0.03, 0.01, 0.05, 0.3}) {
    const double wb = 2.7, v = 20.1168, dt = 0.05;
    const VehicleState s0{5.0, -2.0, 0.7, v};
    VehicleState s = s0;
    for (int i = 0; i < 100; ++i) s = step(s, delta, dt, wb);
    const double r = wb / std::tan(delta);
    const double cx = s0.x - r * std::sin(s0.heading), cy = s0.y + r * std::cos(s0.heading);
    const double h = s0.heading + v / r * 100 * dt;
    worst = std::max(worst, std::hypot(s.x - (cx + r * std::sin(h)), s.y - (cy - r * std::cos(h))));
  }
  return {worst <= 1e-3, "max endpoint error " + num(worst) + " m over 5 steering angles (require <= 1e-3)"};
}

std::string tree_digest(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().filename() != "config.ini") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += fs::relative(f, root).string() + "\n" + slurp(f);
  return all;
}

HarnessConfig small_suite(const fs::path& out) {
  HarnessConfig c = fast_config(out, 5);
  c.suite.types = {IllusionType::RoadCrack, IllusionType::Bicycle, IllusionType::WireShadow,
                   IllusionType::VehicleReflection};
  c.suite.severities = {2, 5};
  c.suite.cases = 2;
  c.suite.frames_per_case = 2;
  return c;
}

// 8. Byte-identical reruns.
Outcome determinism(const fs::path& keep) {
  TempDir dir("accept-8");
  std::string digests[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = k == 0 ? keep : dir / "b";
    const HarnessConfig c = small_suite(out);
    std::ostringstream sink;
    StageLog log(sink);
    cmd_generate(c, log);
    cmd_evaluate(c, {}, log);
    digests[k] = tree_digest(out);
  }
  const bool ok = digests[0] == digests[1] && !digests[0].empty();
  return {ok, std::string(ok ? "identical" : "different") + " manifests, images and CSVs across two runs (" +
                  std::to_string(digests[0].size()) + " bytes compared)"};
}

// 9. Single-factor property over 14 x 5 x 3.
Outcome single_factor() {
  const CameraModel cam = CameraModel::fast();
  int total = 0, ok = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const RoadType road = seed == 1 ? RoadType::GentleCurve : RoadType::Straight;
    const Environment env = build_case(RoadSpec::defaults(road), {}, seed);
    const VehiclePose pose = pose_on_road(env, 12.0);
    const LaneAnnotation gt = ground_truth(env, cam, pose, default_h_samples(cam));
    for (IllusionType t : all_illusion_types()) {
      for (int sev = 1; sev <= 5; ++sev) {
        const Environment out = apply(env, make_spec(t, sev, seed));
        const int changed = (out.statics != env.statics) + (out.dynamics != env.dynamics) + (out.conditions != env.conditions);
        ok += changed == 1 && ground_truth(out, cam, pose, default_h_samples(cam)) == gt;
        ++total;
      }
    }
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                           " (type, severity, seed) triples change exactly one field and keep the annotation"};
}

// 10. Row-anchor annotation lines round-trip and use the -2 sentinel.
Outcome format_compat(const fs::path& dataset) {
  std::ifstream in(dataset / "manifest.jsonl");
  int lines = 0, identical = 0, sentinels = 0, well_formed = 0;
  for (std::string line; std::getline(in, line);) {
    ++lines;
    const auto j = nlohmann::json::parse(line);
    const auto h = j.at("h_samples").get<std::vector<int>>();
    LaneAnnotation a{h, {}};
    bool shape = j.size() == 3 && j.at("raw_file").is_string();
    for (const auto& lane : j.at("lanes")) {
      std::vector<double> xs;
      for (const auto& x : lane) {
        shape = shape && x.is_number_integer();
        sentinels += x.get<double>() == -2.0;
        xs.push_back(x.get<double>());
      }
      shape = shape && xs.size() == h.size();
      a.lanes.push_back(xs);
    }
    well_formed += shape;
    identical += annotation_line(j.at("raw_file").get<std::string>(), a) == line;
  }
  const DatasetManifest m = read_manifest(dataset);
  const bool ok = lines > 0 && identical == lines && well_formed == lines && sentinels > 0 &&
                  m.frames.size() == static_cast<std::size_t>(lines);
  return {ok, std::to_string(identical) + "/" + std::to_string(lines) + " lines re-serialize identically, " +
                  std::to_string(well_formed) + " well formed, " + std::to_string(sentinels) + " -2 sentinels"};
}

}  // namespace

int main() {
  TempDir keep("accept-shared");
  const fs::path det_out = keep / "a";
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"degradation direction", degradation_direction},
      {"severity monotonicity", severity_monotonicity},
      {"metrics oracle", metrics_oracle},
      {"AAM extraction oracle", aam_extraction},
      {"blur oracle", blur_oracle},
      {"ASR sharpness", asr_sharpness},
      {"kinematics closed form", kinematics},
      {"determinism", [&] { return determinism(det_out); }},
      {"single-factor property", single_factor},
      {"format compatibility", [&] { return format_compat(det_out / "dataset"); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[acceptance] criterion %zu %s: %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("[acceptance] %zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
