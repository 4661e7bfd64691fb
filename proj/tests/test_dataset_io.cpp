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

#include <fstream>

#include <json.hpp>

#include "lanebench/dataset_io.hpp"
#include "lanebench/png_io.hpp"
#include "test_util.hpp"

using namespace lanebench;
using lanebench::testing::TempDir;

namespace {

constexpr ImageSize kSize{64, 48};

LaneAnnotation small_annotation() {
  return {{20, 30, 40}, {{10.0, 12.0, kAbsentLane}, {kAbsentLane, 40.0, 50.0}}};
}

FrameRecord record(const std::string& raw_file, std::optional<IllusionSpec> illusion = std::nullopt) {
  FrameRecord f;
  f.raw_file = raw_file;
  f.annotation = small_annotation();
  f.case_id = "case000_f00";
  f.illusion = std::move(illusion);
  f.seed = 42;
  f.image_size = kSize;
  return f;
}

Image gradient_image() {
  Image img(kSize.width, kSize.height);
  for (int y = 0; y < kSize.height; ++y) {
    for (int x = 0; x < kSize.width; ++x) img.set(x, y, {static_cast<std::uint8_t>(4 * x), static_cast<std::uint8_t>(5 * y), 77});
  }
  return img;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream(file, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("manifest round trip") {
  TempDir dir("ds");
  const std::vector<FrameRecord> frames = {record("images/case000_f00/original.png"),
                                           record("images/case000_f00/road_crack_3.png",
                                                  make_spec(IllusionType::RoadCrack, 3, 9))};
  const DatasetManifest written = write_dataset(frames, {gradient_image(), gradient_image()}, dir.path(), 17);
  const DatasetManifest read = read_manifest(dir.path());
  CHECK(read == written);
  CHECK(read.global_seed == 17);
  CHECK(read.frames[1].illusion->params == frames[1].illusion->params);
  CHECK(png::read_rgb(dir / frames[0].raw_file) == gradient_image());
}

TEST_CASE("writer rejects bad frames") {
  TempDir dir("ds-bad");
  DatasetWriter w(dir.path(), 1);
  w.add(record("a.png"), gradient_image());
  SUBCASE("duplicate raw_file") { CHECK_THROWS_AS(w.add(record("a.png"), gradient_image()), ValidationError); }
  SUBCASE("x beyond the image width") {
    FrameRecord f = record("b.png");
    f.image_size = {1280, 720};
    f.annotation.lanes[0][0] = 1300.0;
    CHECK_THROWS_AS(w.add(f, Image(1280, 720)), ValidationError);
  }
  SUBCASE("image size mismatch") { CHECK_THROWS_AS(w.add(record("c.png"), Image(8, 8)), ValidationError); }
  SUBCASE("perturbed frames stay out of the train split") {
    FrameRecord f = record("d.png", make_spec(IllusionType::Vehicle, 1, 2));
    f.split = "train";
    CHECK_THROWS_AS(w.add(f, gradient_image()), ValidationError);
  }
}

TEST_CASE("annotation lines follow the row-anchor convention") {
  const std::string line = annotation_line("clips/0001/20.jpg", small_annotation());
  const auto j = nlohmann::json::parse(line);
  CHECK(j.at("raw_file") == "clips/0001/20.jpg");
  CHECK(j.at("h_samples") == nlohmann::json({20, 30, 40}));
  CHECK(j.at("lanes")[0] == nlohmann::json({10, 12, -2}));
  CHECK(j.at("lanes")[1][0].get<int>() == -2);
  // Whole-pixel values are written as integers.
  CHECK(j.at("lanes")[1][1].is_number_integer());
}

TEST_CASE("quantize_annotation rounds and clamps") {
  const LaneAnnotation a{{10, 20}, {{3.4, 63.7}, {kAbsentLane, 5.5}}};
  const LaneAnnotation q = quantize_annotation(a, kSize);
  CHECK(q.lanes[0][0] == 3.0);
  CHECK(q.lanes[0][1] == 63.0);
  CHECK(q.lanes[1][0] == kAbsentLane);
  CHECK(q.lanes[1][1] == 6.0);
}

TEST_CASE("malformed manifests name the file and line") {
  TempDir dir("ds-parse");
  write_dataset({record("a.png"), record("b.png")}, {gradient_image(), gradient_image()}, dir.path(), 1);
  std::ifstream in(dir / "manifest.jsonl");
  std::string first;
  std::getline(in, first);
  in.close();
  write_text(dir / "manifest.jsonl", first + "\n{\"lanes\": [[1, 2\n");
  CHECK_THROWS_WITH_AS(read_manifest(dir.path()), doctest::Contains("manifest.jsonl:2"), ParseError);
}

TEST_CASE("attention maps") {
  TempDir dir("attn");
  Raster<std::uint8_t> gray(3, 1);
  gray.at(0, 0) = 0;
  gray.at(1, 0) = 255;
  gray.at(2, 0) = 128;
  png::write_gray(dir / "m.png", gray);
  const AttentionMap m = ingest_attention(dir / "m.png", {3, 1});
  CHECK(m.at(0, 0) == 0.0);
  CHECK(m.at(1, 0) == 1.0);
  CHECK(m.at(2, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
  CHECK_THROWS_AS(ingest_attention(dir / "m.png", {4, 1}), ValidationError);

  png::write_rgb(dir / "rgb.png", Image(3, 1));
  CHECK_THROWS_AS(ingest_attention(dir / "rgb.png", {3, 1}), ValidationError);

  export_attention(dir / "back.png", m);
  CHECK(ingest_attention(dir / "back.png", {3, 1}) == m);
  AttentionMap bad(2, 2, 0.5);
  bad.at(1, 1) = 1.5;
  CHECK_THROWS_AS(export_attention(dir / "bad.png", bad), ValidationError);
}

TEST_CASE("HAA repository") {
  TempDir dir("haa");
  SUBCASE("empty repository") { CHECK(load_haa(dir / "repo").empty()); }
  SUBCASE("store three, load three") {
    std::vector<HaaEntry> stored;
    for (int i = 0; i < 3; ++i) {
      HaaEntry e;
      e.rect = {i, 2 * i, 5 + i, 4};
      e.patch = Image(e.rect.width, e.rect.height, {static_cast<std::uint8_t>(40 * i), 9, 200});
      e.source_id = "frame" + std::to_string(i);
      e.score = 0.25 * i;
      e.source_size = kSize;
      store_haa(dir / "repo", e);
      stored.push_back(e);
    }
    CHECK(load_haa(dir / "repo") == stored);
  }
  SUBCASE("rectangle outside the source") {
    HaaEntry e;
    e.rect = {60, 0, 10, 4};
    e.patch = Image(10, 4);
    e.source_size = kSize;
    CHECK_THROWS_AS(store_haa(dir / "repo", e), ValidationError);
  }
}

TEST_CASE("prediction files") {
  TempDir dir("pred");
  const std::vector<PredictionRecord> records = {
      {"a.png", {{20, 30}, {{1.5, 2.25}, {kAbsentLane, 7.0}}, {0.9, 0.1}}},
      {"b.png", {{20, 30}, {}, {}}},
  };
  write_predictions(dir / "p.jsonl", records);
  CHECK(read_predictions(dir / "p.jsonl") == records);

  write_text(dir / "q.jsonl", "{\"raw_file\": \"a.png\", \"h_samples\": [1], \"lanes\": [[3]]}\nnot json\n");
  CHECK_THROWS_WITH_AS(read_predictions(dir / "q.jsonl"), doctest::Contains("q.jsonl:2"), ParseError);

  // Confidence is optional and defaults to 1.
  write_text(dir / "r.jsonl", "{\"raw_file\": \"a.png\", \"h_samples\": [1], \"lanes\": [[3]]}\n");
  CHECK(read_predictions(dir / "r.jsonl")[0].prediction.confidence == std::vector<double>{1.0});
}
