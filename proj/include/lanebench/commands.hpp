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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lanebench/config.hpp"

namespace lanebench {

/// Output layout below the configured root.
struct OutputLayout {
  std::filesystem::path root;

  std::filesystem::path dataset() const { return root / "dataset"; }
  std::filesystem::path eval() const { return root / "eval"; }
  std::filesystem::path scores() const { return eval() / "scores.csv"; }
  std::filesystem::path aam() const { return root / "aam"; }
  std::filesystem::path sim() const { return root / "sim"; }
};

/// Writes "[stage] message" lines.
class StageLog {
 public:
  explicit StageLog(std::ostream& out) : out_(out) {}
  void info(const std::string& stage, const std::string& message);
  void warn(const std::string& stage, const std::string& message);

 private:
  std::ostream& out_;
};

void write_scores(const std::filesystem::path& file, const std::vector<FrameScore>& scores);
/// Throws ValidationError when the file is missing, ParseError when malformed.
std::vector<FrameScore> read_scores(const std::filesystem::path& file);

DatasetManifest cmd_generate(const HarnessConfig& config, StageLog& log);

struct EvaluateOptions {
  std::optional<std::filesystem::path> dataset;      // defaults to the generate output
  std::optional<std::filesystem::path> predictions;  // external detector output
};
MetricsReport cmd_evaluate(const HarnessConfig& config, const EvaluateOptions& options, StageLog& log);

struct AamOptions {
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> scores;
};
struct AamSummary {
  std::size_t hard_frames = 0;
  std::size_t repo_entries = 0;
  std::size_t augmented_frames = 0;
  std::size_t mixed_frames = 0;
};
AamSummary cmd_aam(const HarnessConfig& config, const AamOptions& options, StageLog& log);

struct SimRow {
  SimCase sim_case;
  int runs = 0;
  AsrResult asr;
  double stop_rate = 0.0;        // perturbed runs that triggered the stop rule
  double clean_stop_rate = 0.0;
  double max_clean_deviation = 0.0;
};
std::vector<SimRow> cmd_simulate(const HarnessConfig& config, StageLog& log);
std::string sim_csv(const std::vector<SimRow>& rows, const HarnessConfig& config);

/// Rebuilds the metrics report from stored scores.
MetricsReport cmd_report(const HarnessConfig& config, const AamOptions& options, StageLog& log);

}  // namespace lanebench
