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

#include "lanebench/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace lanebench {
namespace {

struct Track {
  std::vector<Vec2> points;  // birdseye (x, y)
  int hits = 0;
  std::vector<double> coeffs;
  double y_min = 0.0;
};

std::vector<int> find_peaks(const std::vector<double>& hist, const DetectorConfig& cfg) {
  const int n = static_cast<int>(hist.size());
  std::vector<double> smooth(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) smooth[i] += hist[j];
  }
  std::vector<int> candidates;
  for (int i = 0; i < n; ++i) {
    const double v = smooth[i];
    if (v < cfg.peak_floor) continue;
    if ((i > 0 && smooth[i - 1] > v) || (i + 1 < n && smooth[i + 1] >= v)) continue;
    candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) { return smooth[a] > smooth[b]; });
  std::vector<int> peaks;
  for (int c : candidates) {
    const bool clear = std::all_of(peaks.begin(), peaks.end(), [&](int p) { return std::abs(p - c) >= cfg.peak_spacing; });
    if (clear) peaks.push_back(c);
    if (peaks.size() == 6) break;
  }
  return peaks;
}

Track slide(const BinaryMap& bev, int start, const DetectorConfig& cfg) {
  Track t;
  const int h = bev.height(), w = bev.width();
  const int wh = h / cfg.window_count;
  double center = start + 0.5;
  double momentum = 0.0;
  bool last_hit = false;
  t.y_min = h;
  for (int k = 0; k < cfg.window_count; ++k) {
    const int y1 = h - k * wh;
    const int y0 = k == cfg.window_count - 1 ? 0 : y1 - wh;
    const int x0 = std::max(0, static_cast<int>(std::floor(center)) - cfg.window_margin);
    const int x1 = std::min(w - 1, static_cast<int>(std::floor(center)) + cfg.window_margin);
    std::vector<Vec2> found;
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (bev.at(x, y)) found.push_back({x + 0.5, y + 0.5});
      }
    }
    if (static_cast<int>(found.size()) >= cfg.min_pixels) {
      double mean = 0.0;
      for (const Vec2& p : found) mean += p.x;
      mean /= static_cast<double>(found.size());
      if (last_hit) momentum = 0.5 * momentum + 0.5 * (mean - center);
      center = mean;
      last_hit = true;
      ++t.hits;
      t.y_min = std::min<double>(t.y_min, y0);
      t.points.insert(t.points.end(), found.begin(), found.end());
    } else {
      center += momentum;
      last_hit = false;
    }
    if (center < 0.0 || center >= w) break;
  }
  return t;
}

// Image-space crossings of a birdseye curve with the row grid.
std::vector<double> reproject(const Track& t, const Homography& to_image, const std::vector<int>& rows, ImageSize image,
                              int bev_height) {
  std::vector<Vec2> pts;
  const double y_far = std::max(-0.15 * bev_height, t.y_min - 0.15 * bev_height);
  const double y_near = bev_height + 0.02 * bev_height;
  for (double y = y_near; y >= y_far; y -= 0.5) pts.push_back(to_image.apply({eval_poly(t.coeffs, y), y}));
  std::vector<double> xs(rows.size(), kAbsentLane);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double yc = rows[r] + 0.5;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const Vec2 a = pts[i - 1], b = pts[i];
      if ((a.y - yc) * (b.y - yc) > 0.0 || a.y == b.y) continue;
      const double x = a.x + (yc - a.y) / (b.y - a.y) * (b.x - a.x);
      if (x >= 0.0 && x < image.width) xs[r] = x;
      break;
    }
  }
  return xs;
}

}  // namespace

void DetectorConfig::validate() const {
  double sign = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec2 a = trapezoid[i], b = trapezoid[(i + 1) % 4], c = trapezoid[(i + 2) % 4];
    const double cr = (b - a).cross(c - b);
    if (cr == 0.0 || (sign != 0.0 && (cr > 0.0) != (sign > 0.0))) throw ValidationError("detector.trapezoid must be convex");
    sign = cr;
  }
  if (degree != 2 && degree != 3) throw ValidationError("detector.degree must be 2 or 3");
  if (window_count < 4) throw ValidationError("detector.window_count must be at least 4");
  if (window_margin <= 0 || min_pixels <= 0) throw ValidationError("detector.window_margin and min_pixels must be positive");
  if (birdseye_size.width <= 0 || birdseye_size.height < window_count) throw ValidationError("detector birdseye size too small");
  if (gradient_weight < 0.0 || color_weight < 0.0) throw ValidationError("detector weights must be non-negative");
}

Homography DetectorConfig::birdseye_to_image() const {
  const double w = birdseye_size.width, h = birdseye_size.height;
  return Homography::from_points({Vec2{0, 0}, Vec2{w, 0}, Vec2{w, h}, Vec2{0, h}}, trapezoid);
}

DetectorConfig DetectorConfig::for_camera(const CameraModel& camera) {
  camera.validate();
  DetectorConfig cfg;
  const VehiclePose origin{};
  auto img = [&](double fwd, double lat) { return *project(camera, origin, {fwd, lat, 0.0}); };
  cfg.trapezoid = {img(60.0, 9.25), img(60.0, -9.25), img(3.0, -9.25), img(3.0, 9.25)};
  cfg.horizon_row = camera.horizon_row();
  cfg.width_per_row = 0.15 / camera.mount_height;
  return cfg;
}

LanePrediction detect(const Image& image, const DetectorConfig& config, const CameraModel& camera) {
  return detect(image, config, camera, default_h_samples(camera));
}

LanePrediction detect(const Image& image, const DetectorConfig& config, const CameraModel& camera,
                      const std::vector<int>& h_samples, Exec exec) {
  config.validate();
  if (image.size() != camera.size()) throw ValidationError("detect: image size does not match the camera");
  LanePrediction pred;
  pred.h_samples = h_samples;

  const Homography to_image = config.birdseye_to_image();
  const Raster<double> score = lane_score(image, config.score_params(), exec);
  const Raster<double> bev = warp_bilinear(score, to_image, config.birdseye_size, exec);
  const BinaryMap mask = threshold_map(bev, config.pixel_threshold, exec);

  const int w = mask.width(), h = mask.height();
  std::vector<double> hist(w, 0.0);
  for (int y = h / 2; y < h; ++y) {
    for (int x = 0; x < w; ++x) hist[x] += mask.at(x, y);
  }
  std::vector<Track> tracks;
  for (int peak : find_peaks(hist, config)) {
    Track t = slide(mask, peak, config);
    if (t.hits < 3) continue;
    const int degree = std::min(config.degree, t.hits - 1);
    try {
      t.coeffs = fit_lane(t.points, degree);
    } catch (const ValidationError&) {
      continue;
    }
    // Two seeds that converged on the same marking.
    const bool dup = std::any_of(tracks.begin(), tracks.end(), [&](const Track& o) {
      return std::abs(eval_poly(o.coeffs, h) - eval_poly(t.coeffs, h)) < 0.5 * config.peak_spacing &&
             std::abs(eval_poly(o.coeffs, 0.5 * h) - eval_poly(t.coeffs, 0.5 * h)) < 0.5 * config.peak_spacing;
    });
    if (!dup) tracks.push_back(std::move(t));
  }
  std::stable_sort(tracks.begin(), tracks.end(),
                   [&](const Track& a, const Track& b) { return eval_poly(a.coeffs, h) < eval_poly(b.coeffs, h); });
  for (const Track& t : tracks) {
    auto xs = reproject(t, to_image, h_samples, image.size(), h);
    if (std::all_of(xs.begin(), xs.end(), [](double x) { return x == kAbsentLane; })) continue;
    pred.lanes.push_back(std::move(xs));
    pred.confidence.push_back(static_cast<double>(t.hits) / config.window_count);
  }
  return pred;
}

AttentionMap response_map(const Image& image, const DetectorConfig& config, Exec exec) {
  Raster<double> score = lane_score(image, config.score_params(), exec);
  double peak = 0.0;
  for (double v : score.values()) peak = std::max(peak, v);
  if (peak > 0.0) {
    for (double& v : score.values()) v = std::min(1.0, v / peak);
  }
  return score;
}

std::vector<double> fit_lane(const std::vector<Vec2>& points, int degree) {
  if (degree < 0) throw ValidationError("fit_lane: negative degree");
  std::vector<double> ys;
  for (const Vec2& p : points) ys.push_back(p.y);
  std::sort(ys.begin(), ys.end());
  const auto distinct = std::unique(ys.begin(), ys.end()) - ys.begin();
  if (distinct <= degree) {
    throw ValidationError("fit_lane: " + std::to_string(points.size()) + " points cannot determine degree " +
                          std::to_string(degree));
  }
  // Center and scale y for conditioning.
  double mean = 0.0;
  for (const Vec2& p : points) mean += p.y;
  mean /= static_cast<double>(points.size());
  double scale = 0.0;
  for (const Vec2& p : points) scale = std::max(scale, std::abs(p.y - mean));
  if (scale == 0.0) scale = 1.0;
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (points[i].y - mean) / scale;
    double pw = 1.0;
    for (int k = 0; k <= degree; ++k) {
      a(i, k) = pw;
      pw *= t;
    }
    b(i) = points[i].x;
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  // Expand sum_k c_k ((y - mean)/scale)^k into powers of y.
  std::vector<double> out(degree + 1, 0.0);
  for (int k = 0; k <= degree; ++k) {
    const double ck = c(k) / std::pow(scale, k);
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      out[j] += ck * binom * std::pow(-mean, k - j);
      binom = binom * (k - j) / (j + 1);
    }
  }
  return out;
}

double eval_poly(const std::vector<double>& coeffs, double y) {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * y + *it;
  return v;
}

double fit_residual(const std::vector<Vec2>& points, const std::vector<double>& coeffs) {
  double r = 0.0;
  for (const Vec2& p : points) {
    const double e = p.x - eval_poly(coeffs, p.y);
    r += e * e;
  }
  return r;
}

AttentionMap ResponseMapProvider::attention(const std::string&, const Image& image) const {
  return response_map(image, config_);
}

}  // namespace lanebench
