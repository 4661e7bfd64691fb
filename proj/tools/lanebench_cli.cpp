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

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "lanebench/commands.hpp"

namespace {

using namespace lanebench;

int fail(int code, const std::string& what) {
  std::cerr << "[lanebench] error: " << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane detection robustness harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool fast = false;
  std::string dataset, predictions, scores;
  app.add_option("--config", config_path, "INI config file");
  app.add_option("--seed", seed, "Override general.seed");
  app.add_option("--workers", workers, "Worker threads (0: all cores)");
  app.add_flag("--fast", fast, "Render at 640x360");

  auto* generate = app.add_subcommand("generate", "Render paired original/perturbed frames");
  auto* evaluate = app.add_subcommand("evaluate", "Score a dataset and write the metrics report");
  evaluate->add_option("--dataset", dataset, "Dataset root");
  evaluate->add_option("--predictions", predictions, "External predictions (jsonl)");
  auto* aam = app.add_subcommand("aam", "Build the hard-area repository and an augmented dataset");
  aam->add_option("--dataset", dataset, "Dataset root");
  aam->add_option("--scores", scores, "Per-frame scores CSV");
  auto* simulate = app.add_subcommand("simulate", "Closed-loop lane keeping runs");
  auto* report = app.add_subcommand("report", "Rebuild the metrics report from stored scores");
  report->add_option("--dataset", dataset, "Dataset root");
  report->add_option("--scores", scores, "Per-frame scores CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  StageLog log(std::cerr);
  try {
    HarnessConfig config = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    if (fast) {
      config.camera.image_width = CameraModel::fast().image_width;
      config.camera.image_height = CameraModel::fast().image_height;
    }
    if (const char* env = std::getenv("LANEBENCH_OUTPUT"); env && *env) config.output = env;
    config.validate();

    auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s); };
    if (generate->parsed()) {
      cmd_generate(config, log);
    } else if (evaluate->parsed()) {
      cmd_evaluate(config, {opt(dataset), opt(predictions)}, log);
    } else if (aam->parsed()) {
      cmd_aam(config, {opt(dataset), opt(scores)}, log);
    } else if (simulate->parsed()) {
      cmd_simulate(config, log);
    } else if (report->parsed()) {
      cmd_report(config, {opt(dataset), opt(scores)}, log);
    }
  } catch (const ValidationError& e) {
    return fail(2, e.what());
  } catch (const ParseError& e) {
    return fail(2, e.what());
  } catch (const InapplicableError& e) {
    return fail(2, e.what());
  } catch (const std::exception& e) {
    return fail(1, e.what());
  }
  return 0;
}
