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

#include "lanebench/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace lanebench {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError("config key " + key + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ValidationError("config key " + key + ": expected true or false, got '" + s + "'");
}

template <typename F>
auto parse_named(const std::string& key, const std::string& value, F&& parse) {
  try {
    return parse(value);
  } catch (const ValidationError& e) {
    throw ValidationError("config key " + key + ": " + e.what());
  }
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

using Setter = std::function<void(HarnessConfig&, const std::string& key, const std::string& value)>;

template <typename Get>
Setter real(Get get) {
  return [get](HarnessConfig& c, const std::string& k, const std::string& v) { *get(c) = parse_number<double>(k, v); };
}
template <typename Get>
Setter integer(Get get) {
  return [get](HarnessConfig& c, const std::string& k, const std::string& v) { *get(c) = parse_number<int>(k, v); };
}

#define FIELD(expr) [](HarnessConfig& c) { return &(expr); }

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"general.seed",
       [](HarnessConfig& c, const std::string& k, const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"general.output", [](HarnessConfig& c, const std::string&, const std::string& v) { c.output = trim(v); }},
      {"general.workers", integer(FIELD(c.workers))},

      {"camera.width", integer(FIELD(c.camera.image_width))},
      {"camera.height", integer(FIELD(c.camera.image_height))},
      {"camera.fov", real(FIELD(c.camera.horizontal_fov))},
      {"camera.mount_height", real(FIELD(c.camera.mount_height))},
      {"camera.pitch", real(FIELD(c.camera.pitch))},
      {"camera.fast",
       [](HarnessConfig& c, const std::string& k, const std::string& v) {
         if (parse_bool(k, v)) {
           c.camera.image_width = CameraModel::fast().image_width;
           c.camera.image_height = CameraModel::fast().image_height;
         }
       }},

      {"suite.types",
       [](HarnessConfig& c, const std::string& k, const std::string& v) {
         c.suite.types.clear();
         for (const auto& name : split_list(v)) {
           if (name == "all") {
             c.suite.types.assign(all_illusion_types().begin(), all_illusion_types().end());
           } else {
             c.suite.types.push_back(parse_named(k, name, parse_illusion_type));
           }
         }
       }},
      {"suite.severities",
       [](HarnessConfig& c, const std::string& k, const std::string& v) {
         c.suite.severities.clear();
         for (const auto& s : split_list(v)) c.suite.severities.push_back(parse_number<int>(k, s));
       }},
      {"suite.road_types",
       [](HarnessConfig& c, const std::string& k, const std::string& v) {
         c.suite.road_types.clear();
         for (const auto& s : split_list(v)) c.suite.road_types.push_back(parse_named(k, s, parse_road_type));
       }},
      {"suite.cases", integer(FIELD(c.suite.cases))},
      {"suite.frames_per_case", integer(FIELD(c.suite.frames_per_case))},
      {"suite.anchor_s", real(FIELD(c.suite.anchor_s))},
      {"suite.camera_s", real(FIELD(c.suite.camera_s))},
      {"suite.frame_spacing", real(FIELD(c.suite.frame_spacing))},
      {"suite.masks", [](HarnessConfig& c, const std::string& k, const std::string& v) { c.suite.masks = parse_bool(k, v); }},
      {"suite.mask_tolerance", integer(FIELD(c.suite.mask_tolerance))},

      {"detector.gradient_weight", real(FIELD(c.detector.gradient_weight))},
      {"detector.color_weight", real(FIELD(c.detector.color_weight))},
      {"detector.pixel_threshold", real(FIELD(c.detector.pixel_threshold))},
      {"detector.window_count", integer(FIELD(c.detector.window_count))},
      {"detector.window_margin", integer(FIELD(c.detector.window_margin))},
      {"detector.min_pixels", integer(FIELD(c.detector.min_pixels))},
      {"detector.degree", integer(FIELD(c.detector.degree))},
      {"detector.peak_spacing", integer(FIELD(c.detector.peak_spacing))},
      {"detector.peak_floor", real(FIELD(c.detector.peak_floor))},

      {"metrics.pixel_threshold", real(FIELD(c.metrics.pixel_threshold))},
      {"metrics.mask_width", real(FIELD(c.metrics.mask_width))},
      {"metrics.iou_threshold", real(FIELD(c.metrics.iou_threshold))},

      {"aam.sigma", real(FIELD(c.aam.sigma))},
      {"aam.threshold", real(FIELD(c.aam.threshold))},
      {"aam.min_area", integer(FIELD(c.aam.min_area))},
      {"aam.overlap_theta", real(FIELD(c.aam.overlap_theta))},
      {"aam.placement_theta", real(FIELD(c.aam.placement_theta))},
      {"aam.blend_alpha", real(FIELD(c.aam.blend_alpha))},
      {"aam.lane_mask_width", real(FIELD(c.aam.lane_mask_width))},
      {"aam.patches_per_image", integer(FIELD(c.aam.patches_per_image))},
      {"aam.scores", [](HarnessConfig& c, const std::string&, const std::string& v) { c.scores = trim(v); }},

      {"sim.dt", real(FIELD(c.sim.params.dt))},
      {"sim.wheelbase", real(FIELD(c.sim.params.wheelbase))},
      {"sim.lookahead", real(FIELD(c.sim.params.lookahead))},
      {"sim.speed", real(FIELD(c.sim.params.speed))},
      {"sim.camera_offset", real(FIELD(c.sim.params.camera_offset))},
      {"sim.duration", real(FIELD(c.sim.params.duration))},
      {"sim.deviation_threshold", real(FIELD(c.sim.params.deviation_threshold))},
      {"sim.window", real(FIELD(c.sim.params.window))},
      {"sim.runs", integer(FIELD(c.sim.params.runs))},
      {"sim.start_min", real(FIELD(c.sim.params.start_min))},
      {"sim.start_max", real(FIELD(c.sim.params.start_max))},
      {"sim.stop_horizon", real(FIELD(c.sim.params.stop_horizon))},
      {"sim.anchor_s", real(FIELD(c.sim.anchor_s))},
      {"sim.cases",
       [](HarnessConfig& c, const std::string& k, const std::string& v) {
         c.sim.cases.clear();
         for (const auto& s : split_list(v)) c.sim.cases.push_back(parse_named(k, s, parse_sim_case));
       }},
  };
  return table;
}

#undef FIELD

}  // namespace

void SuiteConfig::validate() const {
  if (types.empty()) throw ValidationError("suite.types is empty");
  if (severities.empty()) throw ValidationError("suite.severities is empty");
  for (int s : severities) {
    if (s < 1 || s > kMaxSeverity) throw ValidationError("suite.severities: " + std::to_string(s) + " is outside 1..5");
  }
  if (cases < 1) throw ValidationError("suite.cases must be at least 1");
  if (cases > 999) throw ValidationError("suite.cases must be at most 999");
  if (frames_per_case < 1 || frames_per_case > 99) throw ValidationError("suite.frames_per_case must be in 1..99");
  if (road_types.empty()) throw ValidationError("suite.road_types is empty");
  if (!(camera_s >= 0.0)) throw ValidationError("suite.camera_s must be non-negative");
  if (!(frame_spacing >= 0.0)) throw ValidationError("suite.frame_spacing must be non-negative");
  if (!(anchor_s >= 0.0)) throw ValidationError("suite.anchor_s must be non-negative");
  if (mask_tolerance < 0 || mask_tolerance > 255) throw ValidationError("suite.mask_tolerance must be in 0..255");
}

DetectorConfig DetectorTuning::for_camera(const CameraModel& camera) const {
  DetectorConfig d = DetectorConfig::for_camera(camera);
  d.gradient_weight = gradient_weight;
  d.color_weight = color_weight;
  d.pixel_threshold = pixel_threshold;
  d.window_count = window_count;
  d.window_margin = window_margin;
  d.min_pixels = min_pixels;
  d.degree = degree;
  d.peak_spacing = peak_spacing;
  d.peak_floor = peak_floor;
  d.validate();
  return d;
}

std::string to_string(const SimCase& c) {
  return to_string(c.type) + ":" + std::to_string(c.severity) + ":" + to_string(c.road);
}

SimCase parse_sim_case(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ':')) parts.push_back(trim(item));
  if (parts.size() != 3) throw ValidationError("sim case '" + text + "' is not type:severity:road");
  SimCase c;
  c.type = parse_illusion_type(parts[0]);
  c.severity = parse_number<int>("sim.cases", parts[1]);
  c.road = parse_road_type(parts[2]);
  if (c.severity < 1 || c.severity > kMaxSeverity) throw ValidationError("sim case '" + text + "': severity outside 1..5");
  if (c.road != RoadType::Straight && c.road != RoadType::GentleCurve) {
    throw ValidationError("sim case '" + text + "': closed-loop roads are straight or gentle_curve");
  }
  if (!applicable(c.type, c.road)) throw ValidationError("sim case '" + text + "' is not applicable");
  return c;
}

void SimConfig::validate() const {
  params.validate();
  if (cases.empty()) throw ValidationError("sim.cases is empty");
  if (!(anchor_s > params.start_max + params.camera_offset)) {
    throw ValidationError("sim.anchor_s must exceed start_max + camera_offset");
  }
}

void HarnessConfig::validate() const {
  if (workers < 0) throw ValidationError("general.workers must be non-negative");
  if (output.empty()) throw ValidationError("general.output is empty");
  camera.validate();
  suite.validate();
  detector_config();
  metrics.validate();
  aam.validate();
  sim.validate();
}

HarnessConfig default_config() {
  HarnessConfig c;
  c.suite.types.assign(all_illusion_types().begin(), all_illusion_types().end());
  c.sim.cases = {
      {IllusionType::RoadCrack, 5, RoadType::Straight},
      {IllusionType::RoadRepair, 5, RoadType::GentleCurve},
      {IllusionType::Vehicle, 5, RoadType::Straight},
      {IllusionType::Pedestrian, 5, RoadType::GentleCurve},
      {IllusionType::FenceShadow, 5, RoadType::Straight},
      {IllusionType::WireShadow, 5, RoadType::GentleCurve},
      {IllusionType::SunlightReflection, 5, RoadType::Straight},
      {IllusionType::StreetlightReflection, 5, RoadType::GentleCurve},
  };
  return c;
}

HarnessConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  HarnessConfig config = default_config();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ValidationError("config key " + section + " lies outside a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = setters().find(full);
      if (it == setters().end()) throw ValidationError("unknown config key " + full);
      it->second(config, full, value.data());
    }
  }
  config.validate();
  return config;
}

HarnessConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot read config " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const HarnessConfig& c) {
  auto f = [](double v) { return format_double(v); };
  std::vector<std::string> types, sevs, roads, cases;
  for (auto t : c.suite.types) types.push_back(to_string(t));
  for (int s : c.suite.severities) sevs.push_back(std::to_string(s));
  for (auto r : c.suite.road_types) roads.push_back(to_string(r));
  for (const auto& sc : c.sim.cases) cases.push_back(to_string(sc));
  std::ostringstream o;
  o << "[general]\nseed = " << c.seed << "\noutput = " << c.output.string() << "\nworkers = " << c.workers << "\n\n";
  o << "[camera]\nwidth = " << c.camera.image_width << "\nheight = " << c.camera.image_height
    << "\nfov = " << f(c.camera.horizontal_fov) << "\nmount_height = " << f(c.camera.mount_height)
    << "\npitch = " << f(c.camera.pitch) << "\n\n";
  o << "[suite]\ntypes = " << join(types) << "\nseverities = " << join(sevs) << "\ncases = " << c.suite.cases
    << "\nframes_per_case = " << c.suite.frames_per_case << "\nroad_types = " << join(roads)
    << "\nanchor_s = " << f(c.suite.anchor_s) << "\ncamera_s = " << f(c.suite.camera_s)
    << "\nframe_spacing = " << f(c.suite.frame_spacing) << "\nmasks = " << (c.suite.masks ? "true" : "false")
    << "\nmask_tolerance = " << c.suite.mask_tolerance << "\n\n";
  const DetectorTuning& d = c.detector;
  o << "[detector]\ngradient_weight = " << f(d.gradient_weight) << "\ncolor_weight = " << f(d.color_weight)
    << "\npixel_threshold = " << f(d.pixel_threshold) << "\nwindow_count = " << d.window_count
    << "\nwindow_margin = " << d.window_margin << "\nmin_pixels = " << d.min_pixels << "\ndegree = " << d.degree
    << "\npeak_spacing = " << d.peak_spacing << "\npeak_floor = " << f(d.peak_floor) << "\n\n";
  o << "[metrics]\npixel_threshold = " << f(c.metrics.pixel_threshold) << "\nmask_width = " << f(c.metrics.mask_width)
    << "\niou_threshold = " << f(c.metrics.iou_threshold) << "\n\n";
  const AamConfig& a = c.aam;
  o << "[aam]\nsigma = " << f(a.sigma) << "\nthreshold = " << f(a.threshold) << "\nmin_area = " << a.min_area
    << "\noverlap_theta = " << f(a.overlap_theta) << "\nplacement_theta = " << f(a.placement_theta)
    << "\nblend_alpha = " << f(a.blend_alpha) << "\nlane_mask_width = " << f(a.lane_mask_width)
    << "\npatches_per_image = " << a.patches_per_image << "\n";
  if (c.scores) o << "scores = " << c.scores->string() << "\n";
  const SimParams& s = c.sim.params;
  o << "\n[sim]\ndt = " << f(s.dt) << "\nwheelbase = " << f(s.wheelbase) << "\nlookahead = " << f(s.lookahead)
    << "\nspeed = " << f(s.speed) << "\ncamera_offset = " << f(s.camera_offset) << "\nduration = " << f(s.duration)
    << "\ndeviation_threshold = " << f(s.deviation_threshold) << "\nwindow = " << f(s.window) << "\nruns = " << s.runs
    << "\nstart_min = " << f(s.start_min) << "\nstart_max = " << f(s.start_max) << "\nstop_horizon = " << f(s.stop_horizon)
    << "\nanchor_s = " << f(c.sim.anchor_s) << "\ncases = " << join(cases) << "\n";
  return o.str();
}

}  // namespace lanebench
