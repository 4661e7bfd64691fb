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

#include "lanebench/commands.hpp"

#include <omp.h>

#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "lanebench/png_io.hpp"
#include "lanebench/rng.hpp"

namespace lanebench {
namespace fs = std::filesystem;

namespace {

std::string case_name(int c, int f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "case%03d_f%02d", c, f);
  return buf;
}

int thread_count(const HarnessConfig& config) { return config.workers > 0 ? config.workers : omp_get_max_threads(); }

// OpenMP loop over [0, n). An exception thrown by any iteration is rethrown
// on the calling thread once the loop ends.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(lanebench_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

void reset_dir(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
}

void write_text(const fs::path& file, const std::string& text) {
  fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

void check_camera(const HarnessConfig& config, const DatasetManifest& manifest) {
  for (const FrameRecord& f : manifest.frames) {
    if (f.image_size != config.camera.size()) {
      throw ValidationError("frame " + f.raw_file + " is " + std::to_string(f.image_size.width) + "x" +
                            std::to_string(f.image_size.height) + " but the camera is " +
                            std::to_string(config.camera.image_width) + "x" + std::to_string(config.camera.image_height));
    }
  }
}

struct CaseJob {
  const Environment* env = nullptr;
  std::optional<IllusionSpec> spec;
  std::string raw_file;
};

}  // namespace

void StageLog::info(const std::string& stage, const std::string& message) {
  out_ << '[' << stage << "] " << message << '\n';
}

void StageLog::warn(const std::string& stage, const std::string& message) {
  out_ << '[' << stage << "] warning: " << message << '\n';
}

void write_scores(const fs::path& file, const std::vector<FrameScore>& scores) {
  std::ostringstream out;
  out << "frame_id,accuracy,f1,matched\n";
  for (const FrameScore& s : scores) {
    out << s.frame_id << ',' << format_double(s.accuracy) << ',' << format_double(s.f1) << ',' << s.matched << '\n';
  }
  write_text(file, out.str());
}

std::vector<FrameScore> read_scores(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("scores file " + file.string() + " does not exist");
  std::vector<FrameScore> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n == 1 || line.empty()) continue;
    std::stringstream row(line);
    std::string id, acc, f1, matched;
    if (!std::getline(row, id, ',') || !std::getline(row, acc, ',') || !std::getline(row, f1, ',') ||
        !std::getline(row, matched)) {
      throw ParseError(file.string() + ":" + std::to_string(n) + ": expected 4 fields");
    }
    try {
      out.push_back({id, std::stod(acc), std::stod(f1), std::stoi(matched)});
    } catch (const std::exception&) {
      throw ParseError(file.string() + ":" + std::to_string(n) + ": bad number");
    }
  }
  return out;
}

DatasetManifest cmd_generate(const HarnessConfig& config, StageLog& log) {
  config.validate();
  const OutputLayout out{config.output};
  const SuiteConfig& suite = config.suite;
  const CameraModel& camera = config.camera;
  reset_dir(out.dataset());
  write_text(out.dataset() / "config.ini", dump_config(config));
  DatasetWriter writer(out.dataset(), config.seed);
  log.info("generate", "seed=" + std::to_string(config.seed) + " camera=" + std::to_string(camera.image_width) + "x" +
                           std::to_string(camera.image_height) + " threads=" + std::to_string(thread_count(config)));

  std::size_t perturbed_count = 0;
  for (int c = 0; c < suite.cases; ++c) {
    const RoadType road = suite.road_types[static_cast<std::size_t>(c) % suite.road_types.size()];
    const std::uint64_t case_seed = derive_seed(config.seed, "case", static_cast<std::uint64_t>(c));
    const Environment env = build_case(RoadSpec::defaults(road), EnvironmentalConditions{}, case_seed);

    std::vector<Environment> variants;
    std::vector<IllusionSpec> specs;
    for (IllusionType type : suite.types) {
      if (!applicable(type, road)) {
        log.warn("generate", "case " + std::to_string(c) + ": " + to_string(type) + " does not apply to " + to_string(road));
        continue;
      }
      const std::uint64_t spec_seed = derive_seed(case_seed, "illusion:" + to_string(type));
      for (int sev : suite.severities) {
        specs.push_back(make_spec(type, sev, spec_seed, suite.anchor_s));
        variants.push_back(apply(env, specs.back()));
      }
    }

    Rng jitter(derive_seed(case_seed, "pose"));
    for (int f = 0; f < suite.frames_per_case; ++f) {
      const std::string case_id = case_name(c, f);
      const double s = suite.camera_s + f * suite.frame_spacing;
      const double d = jitter.uniform(-0.25, 0.25);
      const double yaw = jitter.uniform(-0.01, 0.01);
      const VehiclePose pose = pose_on_road(env, s, d, yaw);
      const double t = 0.1 * f;

      std::vector<CaseJob> jobs;
      jobs.push_back({&env, std::nullopt, "images/" + case_id + "/original.png"});
      for (std::size_t v = 0; v < variants.size(); ++v) {
        jobs.push_back({&variants[v], specs[v],
                        "images/" + case_id + "/" + to_string(specs[v].type) + "_" + std::to_string(specs[v].severity) + ".png"});
      }
      std::vector<RenderResult> frames(jobs.size());
      parallel_for(jobs.size(), thread_count(config),
                   [&](std::size_t j) { frames[j] = render(*jobs[j].env, camera, pose, t, Exec::Serial); });

      const LaneAnnotation gt = quantize_annotation(frames[0].annotation, camera.size());
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        FrameRecord rec;
        rec.raw_file = jobs[j].raw_file;
        rec.annotation = gt;
        rec.case_id = case_id;
        rec.illusion = jobs[j].spec;
        rec.seed = jobs[j].spec ? jobs[j].spec->seed : case_seed;
        rec.image_size = camera.size();
        if (j > 0 && suite.masks) {
          const BinaryMap mask = perturbation_mask(frames[0].image, frames[j].image, suite.mask_tolerance);
          writer.add(rec, frames[j].image, &mask);
        } else {
          writer.add(rec, frames[j].image);
        }
      }
      perturbed_count += variants.size();
    }
    log.info("generate", "case " + std::to_string(c) + " (" + to_string(road) + ") done");
  }
  DatasetManifest manifest = writer.finish();
  log.info("generate", "wrote " + std::to_string(manifest.frames.size()) + " frames (" + std::to_string(perturbed_count) +
                           " perturbed) to " + out.dataset().string());
  return manifest;
}

MetricsReport cmd_evaluate(const HarnessConfig& config, const EvaluateOptions& options, StageLog& log) {
  config.validate();
  const OutputLayout out{config.output};
  const fs::path root = options.dataset.value_or(out.dataset());
  const DatasetManifest manifest = read_manifest(root);
  check_camera(config, manifest);
  const DetectorConfig det = config.detector_config();

  std::map<std::string, LanePrediction> external;
  if (options.predictions) {
    for (auto& r : read_predictions(*options.predictions)) external[r.raw_file] = std::move(r.prediction);
    for (const FrameRecord& f : manifest.frames) {
      if (!external.count(f.raw_file)) throw ValidationError("no prediction for " + f.raw_file);
    }
    log.info("evaluate", "scoring external predictions from " + options.predictions->string());
  }

  const std::size_t n = manifest.frames.size();
  std::vector<FrameScore> scores(n);
  std::vector<PredictionRecord> preds(n);
  parallel_for(n, thread_count(config), [&](std::size_t i) {
    const FrameRecord& f = manifest.frames[i];
    LanePrediction p;
    if (options.predictions) {
      p = external.at(f.raw_file);
    } else {
      p = detect(png::read_rgb(root / f.raw_file), det, config.camera, f.annotation.h_samples, Exec::Serial);
    }
    scores[i] = score_frame(f.raw_file, p, f.annotation, f.image_size, config.metrics);
    preds[i] = {f.raw_file, std::move(p)};
  });

  MetricsReport report = aggregate(scores, manifest, config.metrics);
  fs::create_directories(out.eval());
  write_scores(out.scores(), scores);
  if (!options.predictions) write_predictions(out.eval() / "predictions.jsonl", preds);
  write_report(out.eval(), report);
  for (const std::string& w : report.warnings) log.warn("evaluate", w);
  log.info("evaluate", "scored " + std::to_string(n) + " frames; original accuracy " +
                           format_double(report.original_accuracy));
  for (const SummaryRow& c : report.categories) {
    log.info("evaluate", c.label + " acc_gap=" + format_double(c.acc_gap) + " f1_gap=" + format_double(c.f1_gap));
  }
  if (report.overall) log.info("evaluate", "overall acc_gap=" + format_double(report.overall->acc_gap));
  return report;
}

AamSummary cmd_aam(const HarnessConfig& config, const AamOptions& options, StageLog& log) {
  config.validate();
  const OutputLayout out{config.output};
  const fs::path root = options.dataset.value_or(out.dataset());
  const fs::path scores_file = options.scores.value_or(config.scores.value_or(out.scores()));
  const std::vector<FrameScore> scores = read_scores(scores_file);
  const DatasetManifest manifest = read_manifest(root);
  check_camera(config, manifest);
  if (scores.empty()) throw ValidationError("scores file " + scores_file.string() + " is empty");

  AamSummary summary;
  const std::set<std::string> hard = select_hard_examples(scores);
  summary.hard_frames = hard.size();
  std::vector<HardFrame> frames;
  for (const FrameRecord& f : manifest.frames) {
    if (hard.count(f.raw_file)) frames.push_back({f.raw_file, png::read_rgb(root / f.raw_file), f.annotation});
  }
  if (frames.size() != hard.size()) throw ValidationError("scores reference frames missing from the manifest");

  const ResponseMapProvider provider(config.detector_config());
  const std::vector<HaaEntry> repo = build_repo(frames, provider, config.aam);
  summary.repo_entries = repo.size();
  reset_dir(out.aam());
  const fs::path repo_dir = out.aam() / "repo";
  fs::create_directories(repo_dir / "patches");
  write_text(repo_dir / "index.jsonl", "");
  for (const HaaEntry& e : repo) store_haa(repo_dir, e);
  write_text(out.aam() / "config.ini", dump_config(config));
  if (hard.empty()) log.warn("aam", "no hard examples; the augmented set equals the input");
  log.info("aam", std::to_string(hard.size()) + " hard frames, " + std::to_string(repo.size()) + " repo entries");

  DatasetWriter writer(out.aam() / "dataset", config.seed);
  std::size_t failed = 0;
  for (std::size_t i = 0; i < manifest.frames.size(); ++i) {
    const FrameRecord& f = manifest.frames[i];
    Image image = png::read_rgb(root / f.raw_file);
    bool mixed = false;
    // Only originals join the training split; perturbed frames pass through.
    if (f.is_original() && !repo.empty()) {
      Rng pick(derive_seed(config.seed, "aam-pick", i));
      for (int k = 0; k < config.aam.patches_per_image; ++k) {
        const HaaEntry& patch = repo[static_cast<std::size_t>(pick.uniform_int(0, static_cast<int>(repo.size()) - 1))];
        try {
          image = mix(image, f.annotation, patch, config.aam, derive_seed(config.seed, "aam-mix", i * 64 + k)).image;
          mixed = true;
        } catch (const PlacementError&) {
          ++failed;
        }
      }
    }
    FrameRecord rec = f;
    if (f.is_original()) rec.split = "train";
    writer.add(rec, image);
    summary.mixed_frames += mixed ? 1 : 0;
  }
  summary.augmented_frames = writer.finish().frames.size();
  if (failed > 0) log.warn("aam", std::to_string(failed) + " patches found no off-lane placement");
  log.info("aam", "augmented " + std::to_string(summary.mixed_frames) + " of " + std::to_string(summary.augmented_frames) +
                      " frames into " + (out.aam() / "dataset").string());
  return summary;
}

std::vector<SimRow> cmd_simulate(const HarnessConfig& config, StageLog& log) {
  config.validate();
  const OutputLayout out{config.output};
  const SimParams& p = config.sim.params;
  const std::size_t cases = config.sim.cases.size();
  const int runs = p.runs;

  std::vector<Environment> clean(cases), perturbed(cases);
  for (std::size_t i = 0; i < cases; ++i) {
    const SimCase& sc = config.sim.cases[i];
    clean[i] = sim_environment(sc.road, derive_seed(config.seed, "sim-case", i));
    perturbed[i] = apply(clean[i], make_spec(sc.type, sc.severity, derive_seed(config.seed, "sim-illusion", i), config.sim.anchor_s));
  }

  // Job k covers case k / (2 runs), run (k / 2) % runs, clean when k is even.
  const std::size_t jobs = cases * static_cast<std::size_t>(runs) * 2;
  std::vector<SimTrace> traces(jobs);
  parallel_for(jobs, thread_count(config), [&](std::size_t k) {
    const std::size_t i = k / (2 * runs);
    const std::size_t run = (k / 2) % runs;
    Rng start(derive_seed(config.seed, "sim-start", i * 1000 + run));
    const double before = start.uniform(p.start_min, p.start_max);
    EpisodeSpec spec;
    spec.env = k % 2 == 0 ? clean[i] : perturbed[i];
    spec.start_s = config.sim.anchor_s - before - p.camera_offset;
    spec.duration = p.duration;
    spec.dt = p.dt;
    DetectorLaneSource source(config.detector_config());
    traces[k] = run_episode(spec, source, config.camera, p);
  });

  reset_dir(out.sim());
  std::vector<SimRow> rows;
  for (std::size_t i = 0; i < cases; ++i) {
    SimRow row;
    row.sim_case = config.sim.cases[i];
    row.runs = runs;
    std::vector<SimTrace> c, q;
    int stops = 0, clean_stops = 0;
    for (int r = 0; r < runs; ++r) {
      const SimTrace& ct = traces[(i * runs + r) * 2];
      const SimTrace& pt = traces[(i * runs + r) * 2 + 1];
      c.push_back(ct);
      q.push_back(pt);
      stops += apollo_stop(pt, config.camera, p.stop_horizon) ? 1 : 0;
      clean_stops += apollo_stop(ct, config.camera, p.stop_horizon) ? 1 : 0;
      for (const TraceSample& s : ct.samples) row.max_clean_deviation = std::max(row.max_clean_deviation, std::abs(s.deviation));
      const std::string stem = "case" + std::to_string(i) + "_run" + std::to_string(r);
      write_trace_csv(out.sim() / "traces" / (stem + "_clean.csv"), ct);
      write_trace_csv(out.sim() / "traces" / (stem + "_perturbed.csv"), pt);
      if (ct.exited || pt.exited) log.warn("simulate", stem + " left the mapped road");
    }
    row.asr = asr(c, q, p.deviation_threshold, p.window);
    row.stop_rate = static_cast<double>(stops) / runs;
    row.clean_stop_rate = static_cast<double>(clean_stops) / runs;
    log.info("simulate", to_string(row.sim_case) + " asr=" + format_double(row.asr.run_rate) +
                             " stop_rate=" + format_double(row.stop_rate));
    rows.push_back(row);
  }
  write_text(out.sim() / "asr.csv", sim_csv(rows, config));
  write_text(out.sim() / "config.ini", dump_config(config));
  return rows;
}

std::string sim_csv(const std::vector<SimRow>& rows, const HarnessConfig& config) {
  const SimParams& p = config.sim.params;
  std::ostringstream o;
  o << "# seed=" << config.seed << " deviation_threshold=" << format_double(p.deviation_threshold)
    << " window=" << format_double(p.window) << " dt=" << format_double(p.dt) << '\n';
  o << "case,type,category,severity,road,runs,asr,asr_frames,stop_rate,clean_stop_rate,max_clean_deviation\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SimRow& r = rows[i];
    o << i << ',' << to_string(r.sim_case.type) << ',' << to_string(category_of(r.sim_case.type)) << ','
      << r.sim_case.severity << ',' << to_string(r.sim_case.road) << ',' << r.runs << ',' << format_double(r.asr.run_rate)
      << ',' << format_double(r.asr.frame_rate) << ',' << format_double(r.stop_rate) << ','
      << format_double(r.clean_stop_rate) << ',' << format_double(r.max_clean_deviation) << '\n';
  }
  return o.str();
}

MetricsReport cmd_report(const HarnessConfig& config, const AamOptions& options, StageLog& log) {
  config.validate();
  const OutputLayout out{config.output};
  const fs::path root = options.dataset.value_or(out.dataset());
  const std::vector<FrameScore> scores = read_scores(options.scores.value_or(out.scores()));
  const MetricsReport report = aggregate(scores, read_manifest(root), config.metrics);
  write_report(out.eval(), report);
  for (const std::string& w : report.warnings) log.warn("report", w);
  for (const SummaryRow& t : report.types) {
    log.info("report", t.label + " acc_gap=" + format_double(t.acc_gap) + " f1_gap=" + format_double(t.f1_gap));
  }
  if (report.overall) log.info("report", "overall acc_gap=" + format_double(report.overall->acc_gap));
  return report;
}

}  // namespace lanebench
