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
#include <string>
#include <vector>

#include "lanebench/dataset_io.hpp"

namespace lanebench {

struct MetricsParams {
  double pixel_threshold = 20.0;
  double mask_width = 30.0;
  double iou_threshold = 0.5;
  void validate() const;
};

struct FrameScore {
  std::string frame_id;  // raw_file of the frame
  double accuracy = 0.0;
  double f1 = 0.0;
  int matched = 0;
  bool operator==(const FrameScore&) const = default;
};

/// Fraction of present ground-truth points whose paired predicted x lies
/// strictly within pixel_threshold. Lanes are paired greedily by mean row
/// distance. Throws ValidationError on an empty ground truth or mismatched
/// row grids.
double tusimple_accuracy(const LanePrediction& pred, const LaneAnnotation& gt, double pixel_threshold = 20.0);

struct F1Result {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  int matches = 0;
};

/// Stroke mask of one row-anchor lane. Runs of consecutive present points
/// are joined; isolated points become discs.
BinaryMap lane_mask(const std::vector<int>& h_samples, const std::vector<double>& lane, ImageSize size, double width);

/// Pairwise IoU of lane strokes, rows = predictions, columns = ground truth.
std::vector<std::vector<double>> lane_iou_matrix(const LaneAnnotation& pred, const LaneAnnotation& gt, ImageSize size,
                                                 double mask_width);

/// Largest one-to-one matching among pairs with iou >= threshold.
int max_matching(const std::vector<std::vector<double>>& iou, double threshold);

F1Result lane_f1(const LaneAnnotation& pred, const LaneAnnotation& gt, ImageSize size, double mask_width = 30.0,
                 double iou_threshold = 0.5);

FrameScore score_frame(const std::string& frame_id, const LanePrediction& pred, const LaneAnnotation& gt, ImageSize size,
                       const MetricsParams& params = {});

struct ReportRow {
  IllusionCategory category = IllusionCategory::RoadDamage;
  IllusionType type = IllusionType::RoadCrack;
  int severity = 1;
  int frames = 0;
  double acc_perturbed = 0.0;
  double acc_original = 0.0;
  double acc_gap = 0.0;
  double f1_perturbed = 0.0;
  double f1_original = 0.0;
  double f1_gap = 0.0;
};

struct SummaryRow {
  std::string label;  // category name or "overall"
  double acc_perturbed = 0.0;
  double acc_original = 0.0;
  double acc_gap = 0.0;
  double f1_perturbed = 0.0;
  double f1_original = 0.0;
  double f1_gap = 0.0;
};

struct MetricsReport {
  std::vector<ReportRow> rows;           // ordered by type then severity
  std::vector<SummaryRow> types;         // per type, averaged over severities
  std::vector<SummaryRow> categories;    // unweighted mean over types
  std::optional<SummaryRow> overall;     // mean over categories
  double original_accuracy = 0.0;        // all originals
  double original_f1 = 0.0;
  std::vector<std::string> warnings;
  MetricsParams params;
  std::uint64_t seed = 0;                // dataset global seed

  const ReportRow* row(IllusionType type, int severity) const;
  const SummaryRow* category(IllusionCategory c) const;
};

/// Pairs every perturbed frame with the original of its case.
MetricsReport aggregate(const std::vector<FrameScore>& scores, const DatasetManifest& manifest,
                        const MetricsParams& params = {});

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string report_csv(const MetricsReport& report);
/// One bar chart per category: original vs perturbed accuracy by type.
std::string category_svg(const MetricsReport& report, IllusionCategory category);
void write_report(const std::filesystem::path& dir, const MetricsReport& report);

}  // namespace lanebench
