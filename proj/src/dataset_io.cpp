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

#include "lanebench/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lanebench/png_io.hpp"

namespace lanebench {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

ojson number(double v) {
  if (std::floor(v) == v && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

ojson lanes_json(const std::vector<std::vector<double>>& lanes) {
  ojson out = ojson::array();
  for (const auto& lane : lanes) {
    ojson row = ojson::array();
    for (double x : lane) row.push_back(number(x));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::vector<double>> lanes_from(const ojson& j) {
  std::vector<std::vector<double>> lanes;
  for (const auto& lane : j) {
    std::vector<double> xs;
    for (const auto& x : lane) xs.push_back(x.get<double>());
    lanes.push_back(std::move(xs));
  }
  return lanes;
}

ojson spec_json(const IllusionSpec& spec) {
  ojson params = ojson::object();
  for (const auto& [k, v] : spec.params) params[k] = number(v);
  return ojson{{"category", to_string(spec.category)},
               {"type", to_string(spec.type)},
               {"severity", spec.severity},
               {"seed", spec.seed},
               {"params", params}};
}

IllusionSpec spec_from(const ojson& j) {
  IllusionSpec spec;
  spec.category = parse_category(j.at("category").get<std::string>());
  spec.type = parse_illusion_type(j.at("type").get<std::string>());
  spec.severity = j.at("severity").get<int>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [k, v] : j.at("params").items()) spec.params[k] = v.get<double>();
  spec.validate();
  return spec;
}

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string mask_path(const std::string& raw_file) {
  const std::string prefix = "images/";
  if (raw_file.rfind(prefix, 0) == 0) return "masks/" + raw_file.substr(prefix.size());
  return "masks/" + fs::path(raw_file).filename().string();
}

void write_lines(const fs::path& file, const std::vector<std::string>& lines) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  for (const std::string& l : lines) out << l << '\n';
}

}  // namespace

void LanePrediction::validate(ImageSize size) const {
  as_annotation().validate(size);
  if (confidence.size() != lanes.size()) throw ValidationError("prediction: one confidence per lane required");
  for (double c : confidence) {
    if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("prediction: confidence outside [0,1]");
  }
}

void FrameRecord::validate() const {
  if (raw_file.empty()) throw ValidationError("frame record: empty raw_file");
  annotation.validate(image_size);
  if (split != "train" && split != "test") throw ValidationError("frame record: split must be train or test");
  if (split == "train" && !is_original()) throw ValidationError("frame record: train split holds originals only");
  if (illusion) illusion->validate();
}

const FrameRecord* DatasetManifest::find(const std::string& raw_file) const {
  for (const FrameRecord& f : frames) {
    if (f.raw_file == raw_file) return &f;
  }
  return nullptr;
}

LaneAnnotation quantize_annotation(const LaneAnnotation& ann, ImageSize size) {
  LaneAnnotation out = ann;
  for (auto& lane : out.lanes) {
    for (double& x : lane) {
      if (x == kAbsentLane) continue;
      x = std::min<double>(std::lround(x), size.width - 1);
    }
  }
  return out;
}

std::string annotation_line(const std::string& raw_file, const LaneAnnotation& ann) {
  ojson j;
  j["lanes"] = lanes_json(ann.lanes);
  j["h_samples"] = ann.h_samples;
  j["raw_file"] = raw_file;
  return j.dump();
}

std::string illusion_to_json(const IllusionSpec& spec) { return spec_json(spec).dump(); }

IllusionSpec illusion_from_json(const std::string& text) {
  try {
    return spec_from(ojson::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("illusion record: ") + e.what());
  }
}

DatasetWriter::DatasetWriter(fs::path root, std::uint64_t global_seed) : root_(std::move(root)) {
  manifest_.global_seed = global_seed;
  fs::create_directories(root_ / "images");
}

void DatasetWriter::add(const FrameRecord& record, const Image& image, const BinaryMap* mask) {
  if (finished_) throw std::logic_error("DatasetWriter::add after finish");
  record.validate();
  if (image.size() != record.image_size) throw ValidationError("frame " + record.raw_file + ": image size mismatch");
  if (!raw_files_.insert(record.raw_file).second) throw ValidationError("duplicate raw_file " + record.raw_file);
  const fs::path image_path = root_ / record.raw_file;
  fs::create_directories(image_path.parent_path());
  png::write_rgb(image_path, image);
  if (mask) {
    const fs::path mp = root_ / mask_path(record.raw_file);
    fs::create_directories(mp.parent_path());
    png::write_mask(mp, *mask);
  }
  manifest_.frames.push_back(record);
}

DatasetManifest DatasetWriter::finish() {
  finished_ = true;
  std::vector<std::string> manifest_lines, meta_lines;
  for (const FrameRecord& f : manifest_.frames) {
    manifest_lines.push_back(annotation_line(f.raw_file, f.annotation));
    ojson meta;
    meta["raw_file"] = f.raw_file;
    meta["case_id"] = f.case_id;
    meta["illusion"] = f.illusion ? spec_json(*f.illusion) : ojson("original");
    meta["seed"] = f.seed;
    meta["split"] = f.split;
    meta["image_width"] = f.image_size.width;
    meta["image_height"] = f.image_size.height;
    meta["toolkit_version"] = manifest_.toolkit_version;
    meta["global_seed"] = manifest_.global_seed;
    meta_lines.push_back(meta.dump());
  }
  write_lines(root_ / "manifest.jsonl", manifest_lines);
  write_lines(root_ / "meta.jsonl", meta_lines);
  return manifest_;
}

DatasetManifest write_dataset(const std::vector<FrameRecord>& frames, const std::vector<Image>& images,
                              const fs::path& root, std::uint64_t global_seed) {
  if (frames.size() != images.size()) throw ValidationError("write_dataset: frames and images differ in count");
  DatasetWriter writer(root, global_seed);
  for (std::size_t i = 0; i < frames.size(); ++i) writer.add(frames[i], images[i]);
  return writer.finish();
}

DatasetManifest read_manifest(const fs::path& root) {
  const auto lines = read_lines(root / "manifest.jsonl");
  const auto metas = read_lines(root / "meta.jsonl");
  if (lines.size() != metas.size()) {
    throw ParseError("meta.jsonl has " + std::to_string(metas.size()) + " lines but manifest.jsonl has " +
                     std::to_string(lines.size()));
  }
  DatasetManifest m;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = ":" + std::to_string(i + 1) + ": ";
    FrameRecord f;
    try {
      const ojson a = ojson::parse(lines[i]);
      f.raw_file = a.at("raw_file").get<std::string>();
      f.annotation.h_samples = a.at("h_samples").get<std::vector<int>>();
      f.annotation.lanes = lanes_from(a.at("lanes"));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("manifest.jsonl" + where + e.what());
    }
    try {
      const ojson meta = ojson::parse(metas[i]);
      if (meta.at("raw_file").get<std::string>() != f.raw_file) throw ParseError("raw_file differs from manifest.jsonl");
      f.case_id = meta.at("case_id").get<std::string>();
      const ojson& ill = meta.at("illusion");
      if (!(ill.is_string() && ill.get<std::string>() == "original")) f.illusion = spec_from(ill);
      f.seed = meta.at("seed").get<std::uint64_t>();
      f.split = meta.at("split").get<std::string>();
      f.image_size = {meta.at("image_width").get<int>(), meta.at("image_height").get<int>()};
      if (i == 0) {
        m.toolkit_version = meta.at("toolkit_version").get<std::string>();
        m.global_seed = meta.at("global_seed").get<std::uint64_t>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("meta.jsonl" + where + e.what());
    } catch (const std::exception& e) {
      throw ParseError("meta.jsonl" + where + e.what());
    }
    try {
      f.validate();
    } catch (const ValidationError& e) {
      throw ParseError("manifest.jsonl" + where + e.what());
    }
    if (!seen.insert(f.raw_file).second) throw ParseError("manifest.jsonl" + where + "duplicate raw_file " + f.raw_file);
    if (!fs::exists(root / f.raw_file)) throw ParseError("manifest.jsonl" + where + "missing file " + f.raw_file);
    m.frames.push_back(std::move(f));
  }
  return m;
}

AttentionMap ingest_attention(const fs::path& file, ImageSize expected) {
  const png::Header h = png::read_header(file);
  if (!h.grayscale || h.has_alpha || h.bit_depth != 8) {
    throw ValidationError("attention map " + file.string() + ": expected 8-bit grayscale PNG");
  }
  if (h.width != expected.width || h.height != expected.height) {
    throw ValidationError("attention map " + file.string() + ": size " + std::to_string(h.width) + "x" +
                          std::to_string(h.height) + " does not match the frame");
  }
  const auto gray = png::read_gray(file);
  AttentionMap map(gray.width(), gray.height());
  for (std::size_t i = 0; i < gray.values().size(); ++i) map.values()[i] = gray.values()[i] / 255.0;
  return map;
}

void export_attention(const fs::path& file, const AttentionMap& map) {
  validate_attention(map);
  Raster<std::uint8_t> gray(map.width(), map.height());
  for (std::size_t i = 0; i < map.values().size(); ++i) gray.values()[i] = quantize(map.values()[i]);
  png::write_gray(file, gray);
}

void HaaEntry::validate() const {
  if (!rect.within(source_size) || rect.area() <= 0) throw ValidationError("HAA entry: rectangle outside the source image");
  if (patch.width() != rect.width || patch.height() != rect.height) {
    throw ValidationError("HAA entry: patch size differs from its rectangle");
  }
}

void store_haa(const fs::path& repo, const HaaEntry& entry) {
  entry.validate();
  fs::create_directories(repo / "patches");
  const fs::path index = repo / "index.jsonl";
  std::size_t n = 0;
  if (fs::exists(index)) n = read_lines(index).size();
  char name[32];
  std::snprintf(name, sizeof(name), "patches/%06zu.png", n);
  png::write_rgb(repo / name, entry.patch);
  ojson j;
  j["patch"] = name;
  j["source_id"] = entry.source_id;
  j["rect"] = {entry.rect.x, entry.rect.y, entry.rect.width, entry.rect.height};
  j["score"] = entry.score;
  j["source_width"] = entry.source_size.width;
  j["source_height"] = entry.source_size.height;
  std::ofstream out(index, std::ios::binary | std::ios::app);
  out << j.dump() << '\n';
}

std::vector<HaaEntry> load_haa(const fs::path& repo) {
  std::vector<HaaEntry> out;
  const fs::path index = repo / "index.jsonl";
  if (!fs::exists(index)) return out;
  const auto lines = read_lines(index);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "HAA index entry " + std::to_string(i + 1) + ": ";
    HaaEntry e;
    try {
      const ojson j = ojson::parse(lines[i]);
      const auto r = j.at("rect").get<std::vector<int>>();
      if (r.size() != 4) throw ParseError("rect needs 4 values");
      e.rect = {r[0], r[1], r[2], r[3]};
      e.source_id = j.at("source_id").get<std::string>();
      e.score = j.at("score").get<double>();
      e.source_size = {j.at("source_width").get<int>(), j.at("source_height").get<int>()};
      e.patch = png::read_rgb(repo / j.at("patch").get<std::string>());
      e.validate();
    } catch (const std::exception& ex) {
      throw ParseError(where + ex.what());
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_predictions(const fs::path& file, const std::vector<PredictionRecord>& records) {
  std::vector<std::string> lines;
  for (const PredictionRecord& r : records) {
    ojson j;
    j["lanes"] = lanes_json(r.prediction.lanes);
    j["h_samples"] = r.prediction.h_samples;
    j["raw_file"] = r.raw_file;
    j["confidence"] = r.prediction.confidence;
    lines.push_back(j.dump());
  }
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  write_lines(file, lines);
}

std::vector<PredictionRecord> read_predictions(const fs::path& file) {
  std::vector<PredictionRecord> out;
  const auto lines = read_lines(file);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      const ojson j = ojson::parse(lines[i]);
      PredictionRecord r;
      r.raw_file = j.at("raw_file").get<std::string>();
      r.prediction.h_samples = j.at("h_samples").get<std::vector<int>>();
      r.prediction.lanes = lanes_from(j.at("lanes"));
      if (j.contains("confidence")) {
        r.prediction.confidence = j.at("confidence").get<std::vector<double>>();
      } else {
        r.prediction.confidence.assign(r.prediction.lanes.size(), 1.0);
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(file.filename().string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lanebench
