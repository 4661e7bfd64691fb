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
#include <set>
#include <string>
#include <vector>

#include "lanebench/illusions.hpp"
#include "lanebench/prediction.hpp"

namespace lanebench {

inline constexpr const char* kToolkitVersion = "1.0.0";

struct FrameRecord {
  std::string raw_file;  // relative to the dataset root
  LaneAnnotation annotation;
  std::string case_id;
  std::optional<IllusionSpec> illusion;  // nullopt for originals
  std::uint64_t seed = 0;
  std::string split = "test";
  ImageSize image_size;

  bool is_original() const { return !illusion.has_value(); }
  /// Lane invariants, split rule.
  void validate() const;
  bool operator==(const FrameRecord&) const = default;
};

struct DatasetManifest {
  std::vector<FrameRecord> frames;
  std::string toolkit_version = kToolkitVersion;
  std::uint64_t global_seed = 0;

  const FrameRecord* find(const std::string& raw_file) const;
  bool operator==(const DatasetManifest&) const = default;
};

/// Rounds lane x values to whole pixels, the row-anchor file convention.
LaneAnnotation quantize_annotation(const LaneAnnotation& ann, ImageSize size);

/// Streams frames to disk; the manifest files are written by finish().
/// Single writer per dataset root.
class DatasetWriter {
 public:
  DatasetWriter(std::filesystem::path root, std::uint64_t global_seed);

  /// Writes the image (and mask, if given) to root/raw_file and
  /// root/masks/..., then queues the record.
  void add(const FrameRecord& record, const Image& image, const BinaryMap* mask = nullptr);
  DatasetManifest finish();

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  DatasetManifest manifest_;
  std::set<std::string> raw_files_;
  bool finished_ = false;
};

DatasetManifest write_dataset(const std::vector<FrameRecord>& frames, const std::vector<Image>& images,
                              const std::filesystem::path& root, std::uint64_t global_seed);

/// Parses root/manifest.jsonl and root/meta.jsonl. Throws ParseError naming
/// the file and line on malformed or inconsistent records.
DatasetManifest read_manifest(const std::filesystem::path& root);

/// One row-anchor record: {"lanes": ..., "h_samples": ..., "raw_file": ...}.
std::string annotation_line(const std::string& raw_file, const LaneAnnotation& ann);

std::string illusion_to_json(const IllusionSpec& spec);
IllusionSpec illusion_from_json(const std::string& text);

/// Grey PNG (8-bit) scaled into [0,1].
AttentionMap ingest_attention(const std::filesystem::path& file, ImageSize expected);
/// Inverse of ingest_attention up to 8-bit quantization.
void export_attention(const std::filesystem::path& file, const AttentionMap& map);

struct HaaEntry {
  Image patch;
  std::string source_id;
  Rect rect;
  double score = 0.0;
  ImageSize source_size;

  void validate() const;
  bool operator==(const HaaEntry&) const = default;
};

/// Appends to repo/index.jsonl and writes the patch under repo/patches.
void store_haa(const std::filesystem::path& repo, const HaaEntry& entry);
std::vector<HaaEntry> load_haa(const std::filesystem::path& repo);

struct PredictionRecord {
  std::string raw_file;
  LanePrediction prediction;
  bool operator==(const PredictionRecord&) const = default;
};

void write_predictions(const std::filesystem::path& file, const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& file);

}  // namespace lanebench
