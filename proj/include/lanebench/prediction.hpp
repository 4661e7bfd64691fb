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

#include <vector>

#include "lanebench/scene.hpp"

namespace lanebench {

/// Detector output on the evaluation row grid.
struct LanePrediction {
  std::vector<int> h_samples;
  std::vector<std::vector<double>> lanes;  // kAbsentLane where missing
  std::vector<double> confidence;          // one per lane, in [0,1]

  bool empty() const { return lanes.empty(); }
  void validate(ImageSize size) const;
  LaneAnnotation as_annotation() const { return {h_samples, lanes}; }
  bool operator==(const LanePrediction&) const = default;
};

}  // namespace lanebench
