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

#include <functional>
#include <span>

#include "lanebench/image.hpp"

namespace lanebench {

/// Sets every pixel whose center lies within width/2 of the polyline.
/// A single point draws a disc.
void stroke_polyline(BinaryMap& mask, std::span<const Vec2> points, double width);

/// Calls fn(x, y) for every pixel whose center lies inside the convex
/// polygon (vertices in pixel coordinates, either winding).
void scan_convex_polygon(ImageSize size, std::span<const Vec2> polygon, const std::function<void(int, int)>& fn);

}  // namespace lanebench
