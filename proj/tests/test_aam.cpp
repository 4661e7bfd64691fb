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

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lanebench/aam.hpp"
#include "lanebench/rng.hpp"
#include "oracles.hpp"

using namespace lanebench;
using lanebench::testing::dense_blur;
using lanebench::testing::planted_map;

namespace {

AttentionMap random_map(std::uint64_t seed, int w, int h) {
  Rng rng(seed);
  AttentionMap m(w, h);
  for (double& v : m.values()) v = rng.uniform(0.0, 1.0);
  return m;
}

double total(const AttentionMap& m) { return std::accumulate(m.values().begin(), m.values().end(), 0.0); }

BinaryMap block(int w, int h, Rect r) {
  BinaryMap m(w, h);
  for (int y = r.y; y < r.y + r.height; ++y) {
    for (int x = r.x; x < r.x + r.width; ++x) m.at(x, y) = 1;
  }
  return m;
}

Image textured(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.set(x, y, {static_cast<std::uint8_t>(x % 251), static_cast<std::uint8_t>(y % 251), 60});
  }
  return img;
}

}  // namespace

TEST_CASE("hard examples sit strictly below the mean") {
  const std::vector<FrameScore> scores = {{"a", 1.0, 1.0, 3}, {"b", 0.5, 1.0, 3}, {"c", 1.0, 0.4, 1}, {"d", 0.9, 0.9, 2}};
  // Means: accuracy 0.85, f1 0.825.
  CHECK(select_hard_examples(scores) == std::set<std::string>{"b", "c"});
  const std::vector<FrameScore> same = {{"a", 0.7, 0.7, 1}, {"b", 0.7, 0.7, 1}, {"c", 0.7, 0.7, 1}};
  CHECK(select_hard_examples(same).empty());
  CHECK_THROWS_AS(select_hard_examples({}), ValidationError);
}

TEST_CASE("blur") {
  SUBCASE("matches dense convolution") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const AttentionMap m = random_map(seed, 37, 23);
      for (double sigma : {0.7, 2.0, 4.0}) {
        const AttentionMap fast = blur(m, sigma);
        const AttentionMap ref = dense_blur(m, sigma);
        for (std::size_t i = 0; i < ref.values().size(); ++i) CHECK(std::abs(fast.values()[i] - ref.values()[i]) <= 1e-6);
        CHECK(std::abs(total(fast) - total(m)) <= 1e-6 * std::max(1.0, total(m)));
        CHECK(blur(m, sigma, Exec::Serial) == fast);
      }
    }
  }
  SUBCASE("impulse spreads into the kernel") {
    AttentionMap m(41, 41);
    m.at(20, 20) = 1.0;
    const auto k = gaussian_kernel(2.0);
    const AttentionMap b = blur(m, 2.0);
    const int r = static_cast<int>(k.size() / 2);
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) CHECK(b.at(20 + dx, 20 + dy) == doctest::Approx(k[dx + r] * k[dy + r]).epsilon(1e-12));
    }
  }
  SUBCASE("constant maps stay constant") {
    const AttentionMap b = blur(AttentionMap(15, 9, 0.3), 3.0);
    for (double v : b.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("sigma 0 copies") {
    const AttentionMap m = random_map(4, 10, 10);
    CHECK(blur(m, 0.0) == m);
  }
}

TEST_CASE("binarize is strict") {
  AttentionMap m(3, 1);
  m.at(0, 0) = 0.5;
  m.at(1, 0) = 0.5000001;
  m.at(2, 0) = 0.1;
  const BinaryMap b = binarize(m, 0.5);
  CHECK(b.at(0, 0) == 0);
  CHECK(b.at(1, 0) == 1);
  CHECK(b.at(2, 0) == 0);
  CHECK_THROWS_AS(binarize(m, 1.0), ValidationError);
}

TEST_CASE("regions") {
  SUBCASE("area filter") {
    BinaryMap m = block(40, 30, {2, 2, 10, 10});
    const BinaryMap small = block(40, 30, {25, 20, 5, 5});
    for (std::size_t i = 0; i < m.values().size(); ++i) m.values()[i] |= small.values()[i];
    const auto regions = extract_regions(m, 64);
    REQUIRE(regions.size() == 1);
    CHECK(regions[0].area() == 100);
    CHECK(regions[0].bbox == Rect{2, 2, 10, 10});
    CHECK(extract_regions(m, 0).size() == 2);
  }
  SUBCASE("L shape bounding box") {
    BinaryMap m = block(30, 30, {5, 5, 3, 15});
    const BinaryMap foot = block(30, 30, {5, 17, 12, 3});
    for (std::size_t i = 0; i < m.values().size(); ++i) m.values()[i] |= foot.values()[i];
    const auto regions = extract_regions(m, 0);
    REQUIRE(regions.size() == 1);
    CHECK(regions[0].bbox == Rect{5, 5, 12, 15});
  }
  SUBCASE("diagonal neighbours connect") {
    BinaryMap m(4, 4);
    m.at(0, 0) = m.at(1, 1) = m.at(2, 2) = 1;
    CHECK(extract_regions(m, 0).size() == 1);
  }
}

TEST_CASE("planted rectangles") {
  AamConfig cfg;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto off = planted_map(seed, false);
    const Image img(320, 180);
    const auto entries = extract_haa("f", img, off.gt, off.map, cfg);
    REQUIRE(entries.size() == 1);
    CHECK(rect_iou(entries[0].rect, off.rect) == 1.0);
    CHECK(entries[0].patch.size() == ImageSize{off.rect.width, off.rect.height});

    const auto on = planted_map(seed, true);
    CHECK(extract_haa("f", img, on.gt, on.map, cfg).empty());
  }
  CHECK_THROWS_AS(extract_haa("f", Image(10, 10), {}, AttentionMap(9, 10), cfg), ValidationError);
}

TEST_CASE("mix") {
  const auto gt = lanebench::testing::planted_lanes();
  const Image img = textured(320, 180);
  HaaEntry patch;
  patch.patch = Image(24, 18, {250, 10, 10});
  patch.rect = {0, 0, 24, 18};
  patch.source_size = {320, 180};
  patch.source_id = "src";
  AamConfig cfg;

  SUBCASE("alpha 1 pastes the patch and nothing else") {
    cfg.blend_alpha = 1.0;
    const MixResult r = mix(img, gt, patch, cfg, 5);
    CHECK(r.annotation == gt);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const bool inside = x >= r.placed.x && x < r.placed.x + r.placed.width && y >= r.placed.y &&
                            y < r.placed.y + r.placed.height;
        if (inside) {
          CHECK(r.image.at(x, y) == patch.patch.at(x - r.placed.x, y - r.placed.y));
        } else if (r.image.at(x, y) != img.at(x, y)) {
          FAIL("pixel outside the placed rectangle changed");
        }
      }
    }
  }
  SUBCASE("placements avoid the lanes") {
    const BinaryMap lanes = lane_stroke_mask(gt, img.size(), cfg.lane_mask_width);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const MixResult r = mix(img, gt, patch, cfg, seed);
      int hit = 0;
      for (int y = r.placed.y; y < r.placed.y + r.placed.height; ++y) {
        for (int x = r.placed.x; x < r.placed.x + r.placed.width; ++x) hit += lanes.at(x, y);
      }
      if (!(hit < cfg.placement_theta * r.placed.area())) FAIL("placement on a lane, seed " << seed);
      if (!r.placed.within(img.size())) FAIL("placement outside the image, seed " << seed);
      if (r.placed.y + r.placed.height <= 60) FAIL("placement above the road rows, seed " << seed);
    }
    CHECK(mix(img, gt, patch, cfg, 3).placed == mix(img, gt, patch, cfg, 3).placed);
  }
  SUBCASE("no room") {
    cfg.lane_mask_width = 400.0;
    CHECK_THROWS_AS(mix(img, gt, patch, cfg, 1), PlacementError);
  }
}

TEST_CASE("baseline augmentations") {
  const Image img = textured(64, 32);
  SUBCASE("cutout zeroes one rectangle") {
    const Image out = baseline_augment(img, "cutout", {8, 6, 0.5}, 2);
    int zero = 0, changed = 0;
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 64; ++x) {
        zero += out.at(x, y) == Rgb8{};
        changed += out.at(x, y) != img.at(x, y);
      }
    }
    CHECK(zero >= 48);
    CHECK(changed <= 48);
  }
  SUBCASE("mixup") {
    const Image other(64, 32, {200, 200, 200});
    const std::vector<Image> pool{other};
    CHECK(baseline_augment(img, "mixup", {0, 0, 1.0}, 1, pool) == img);
    CHECK(baseline_augment(img, "mixup", {0, 0, 0.0}, 1, pool) == other);
    CHECK_THROWS_AS(baseline_augment(img, "mixup", {0, 0, 0.5}, 1), ValidationError);
  }
  CHECK_THROWS_AS(baseline_augment(img, "mosaic", {}, 1), ValidationError);
}
