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

#include "lanebench/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "lanebench/raster.hpp"

namespace lanebench {
namespace {

struct Pair {
  double dist;
  std::size_t gt;
  std::size_t pred;
};

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

SummaryRow summarize(const std::string& label, const std::vector<SummaryRow>& parts) {
  SummaryRow out;
  out.label = label;
  std::vector<double> ap, ao, fp, fo;
  for (const SummaryRow& r : parts) {
    ap.push_back(r.acc_perturbed);
    ao.push_back(r.acc_original);
    fp.push_back(r.f1_perturbed);
    fo.push_back(r.f1_original);
  }
  out.acc_perturbed = mean(ap);
  out.acc_original = mean(ao);
  out.acc_gap = out.acc_perturbed - out.acc_original;
  out.f1_perturbed = mean(fp);
  out.f1_original = mean(fo);
  out.f1_gap = out.f1_perturbed - out.f1_original;
  return out;
}

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) out += c == '&' ? std::string("&amp;") : c == '<' ? std::string("&lt;") : std::string(1, c);
  return out;
}

}  // namespace

void MetricsParams::validate() const {
  if (!(pixel_threshold > 0.0)) throw ValidationError("metrics.pixel_threshold must be positive");
  if (!(mask_width > 0.0)) throw ValidationError("metrics.mask_width must be positive");
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw ValidationError("metrics.iou_threshold must be in (0,1]");
}

double tusimple_accuracy(const LanePrediction& pred, const LaneAnnotation& gt, double pixel_threshold) {
  if (!pred.empty() && pred.h_samples != gt.h_samples) throw ValidationError("tusimple_accuracy: row grids differ");
  const std::size_t rows = gt.h_samples.size();
  std::size_t total = 0;
  for (const auto& lane : gt.lanes) {
    total += static_cast<std::size_t>(std::count_if(lane.begin(), lane.end(), [](double x) { return x != kAbsentLane; }));
  }
  if (total == 0) throw ValidationError("tusimple_accuracy: ground truth has no lane points");

  constexpr double kMissPenalty = 1e4;
  std::vector<Pair> pairs;
  for (std::size_t g = 0; g < gt.lanes.size(); ++g) {
    for (std::size_t p = 0; p < pred.lanes.size(); ++p) {
      double sum = 0.0;
      int n = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        const double gx = gt.lanes[g][r];
        if (gx == kAbsentLane) continue;
        const double px = pred.lanes[p][r];
        sum += px == kAbsentLane ? kMissPenalty : std::abs(px - gx);
        ++n;
      }
      if (n > 0) pairs.push_back({sum / n, g, p});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.dist < b.dist; });
  std::vector<bool> gt_used(gt.lanes.size()), pred_used(pred.lanes.size());
  std::size_t correct = 0;
  for (const Pair& pr : pairs) {
    if (gt_used[pr.gt] || pred_used[pr.pred]) continue;
    gt_used[pr.gt] = pred_used[pr.pred] = true;
    for (std::size_t r = 0; r < rows; ++r) {
      const double gx = gt.lanes[pr.gt][r];
      const double px = pred.lanes[pr.pred][r];
      if (gx != kAbsentLane && px != kAbsentLane && std::abs(px - gx) < pixel_threshold) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

BinaryMap lane_mask(const std::vector<int>& h_samples, const std::vector<double>& lane, ImageSize size, double width) {
  BinaryMap mask(size.width, size.height);
  std::vector<Vec2> run;
  auto flush = [&] {
    if (!run.empty()) stroke_polyline(mask, run, width);
    run.clear();
  };
  for (std::size_t r = 0; r < h_samples.size(); ++r) {
    if (lane[r] == kAbsentLane) {
      flush();
      continue;
    }
    run.push_back({lane[r], h_samples[r] + 0.5});
  }
  flush();
  return mask;
}

std::vector<std::vector<double>> lane_iou_matrix(const LaneAnnotation& pred, const LaneAnnotation& gt, ImageSize size,
                                                 double mask_width) {
  std::vector<BinaryMap> pm, gm;
  for (const auto& l : pred.lanes) pm.push_back(lane_mask(pred.h_samples, l, size, mask_width));
  for (const auto& l : gt.lanes) gm.push_back(lane_mask(gt.h_samples, l, size, mask_width));
  std::vector<std::vector<double>> iou(pm.size(), std::vector<double>(gm.size(), 0.0));
  for (std::size_t i = 0; i < pm.size(); ++i) {
    for (std::size_t j = 0; j < gm.size(); ++j) {
      std::size_t inter = 0, uni = 0;
      const auto a = pm[i].values();
      const auto b = gm[j].values();
      for (std::size_t k = 0; k < a.size(); ++k) {
        inter += a[k] & b[k];
        uni += a[k] | b[k];
      }
      iou[i][j] = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
  }
  return iou;
}

int max_matching(const std::vector<std::vector<double>>& iou, double threshold) {
  const std::size_t rows = iou.size();
  const std::size_t cols = rows == 0 ? 0 : iou[0].size();
  if (cols == 0) return 0;
  if (cols > rows) {
    std::vector<std::vector<double>> t(cols, std::vector<double>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) t[j][i] = iou[i][j];
    }
    return max_matching(t, threshold);
  }
  if (cols > 20) throw ValidationError("max_matching: too many lanes");
  // Subset DP over the smaller side.
  const std::size_t states = std::size_t{1} << cols;
  std::vector<int> dp(states, -1);
  dp[0] = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<int> next = dp;
    for (std::size_t mask = 0; mask < states; ++mask) {
      if (dp[mask] < 0) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        if ((mask >> j) & 1U || iou[i][j] < threshold) continue;
        next[mask | (std::size_t{1} << j)] = std::max(next[mask | (std::size_t{1} << j)], dp[mask] + 1);
      }
    }
    dp = std::move(next);
  }
  return *std::max_element(dp.begin(), dp.end());
}

F1Result lane_f1(const LaneAnnotation& pred, const LaneAnnotation& gt, ImageSize size, double mask_width,
                 double iou_threshold) {
  if (!(mask_width > 0.0)) throw ValidationError("lane_f1: mask_width must be positive");
  F1Result r;
  r.matches = max_matching(lane_iou_matrix(pred, gt, size, mask_width), iou_threshold);
  r.precision = pred.lanes.empty() ? 0.0 : static_cast<double>(r.matches) / static_cast<double>(pred.lanes.size());
  r.recall = gt.lanes.empty() ? 0.0 : static_cast<double>(r.matches) / static_cast<double>(gt.lanes.size());
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

FrameScore score_frame(const std::string& frame_id, const LanePrediction& pred, const LaneAnnotation& gt, ImageSize size,
                       const MetricsParams& params) {
  // Lanes entirely outside the frame carry no information for either metric.
  LaneAnnotation visible{gt.h_samples, {}};
  for (const auto& lane : gt.lanes) {
    if (std::any_of(lane.begin(), lane.end(), [](double x) { return x != kAbsentLane; })) visible.lanes.push_back(lane);
  }
  if (visible.lanes.empty()) throw ValidationError("frame " + frame_id + ": ground truth has no lane points");
  FrameScore s;
  s.frame_id = frame_id;
  s.accuracy = tusimple_accuracy(pred, visible, params.pixel_threshold);
  const F1Result f = lane_f1(pred.as_annotation(), visible, size, params.mask_width, params.iou_threshold);
  s.f1 = f.f1;
  s.matched = f.matches;
  return s;
}

const ReportRow* MetricsReport::row(IllusionType type, int severity) const {
  for (const ReportRow& r : rows) {
    if (r.type == type && r.severity == severity) return &r;
  }
  return nullptr;
}

const SummaryRow* MetricsReport::category(IllusionCategory c) const {
  for (const SummaryRow& r : categories) {
    if (r.label == to_string(c)) return &r;
  }
  return nullptr;
}

MetricsReport aggregate(const std::vector<FrameScore>& scores_in, const DatasetManifest& manifest,
                        const MetricsParams& params) {
  MetricsReport report;
  report.params = params;
  report.seed = manifest.global_seed;
  std::vector<FrameScore> scores = scores_in;
  std::sort(scores.begin(), scores.end(), [](const FrameScore& a, const FrameScore& b) { return a.frame_id < b.frame_id; });

  std::map<std::string, const FrameRecord*> by_file;
  std::map<std::string, const FrameScore*> original_of_case;
  for (const FrameRecord& f : manifest.frames) by_file[f.raw_file] = &f;
  for (const FrameScore& s : scores) {
    const auto it = by_file.find(s.frame_id);
    if (it == by_file.end()) throw ValidationError("score for unknown frame " + s.frame_id);
    if (it->second->is_original()) original_of_case[it->second->case_id] = &s;
  }

  struct Acc {
    std::vector<double> ap, ao, fp, fo;
  };
  std::map<std::pair<int, int>, Acc> cells;
  std::vector<double> oa, of;
  for (const FrameScore& s : scores) {
    const FrameRecord& f = *by_file.at(s.frame_id);
    if (f.is_original()) {
      oa.push_back(s.accuracy);
      of.push_back(s.f1);
      continue;
    }
    const auto orig = original_of_case.find(f.case_id);
    if (orig == original_of_case.end()) {
      throw ValidationError("perturbed frame " + f.raw_file + " has no original for case " + f.case_id);
    }
    Acc& c = cells[{static_cast<int>(f.illusion->type), f.illusion->severity}];
    c.ap.push_back(s.accuracy);
    c.ao.push_back(orig->second->accuracy);
    c.fp.push_back(s.f1);
    c.fo.push_back(orig->second->f1);
  }
  report.original_accuracy = mean(oa);
  report.original_f1 = mean(of);
  if (cells.empty()) {
    report.warnings.push_back("no perturbed frames; gap columns are empty");
    return report;
  }

  std::map<int, std::vector<SummaryRow>> per_type;
  for (const auto& [key, c] : cells) {
    ReportRow r;
    r.type = static_cast<IllusionType>(key.first);
    r.category = category_of(r.type);
    r.severity = key.second;
    r.frames = static_cast<int>(c.ap.size());
    r.acc_perturbed = mean(c.ap);
    r.acc_original = mean(c.ao);
    r.acc_gap = r.acc_perturbed - r.acc_original;
    r.f1_perturbed = mean(c.fp);
    r.f1_original = mean(c.fo);
    r.f1_gap = r.f1_perturbed - r.f1_original;
    report.rows.push_back(r);
    per_type[key.first].push_back({"", r.acc_perturbed, r.acc_original, 0, r.f1_perturbed, r.f1_original, 0});
  }
  std::map<int, std::vector<SummaryRow>> per_category;
  for (const auto& [type, rows] : per_type) {
    const SummaryRow t = summarize(to_string(static_cast<IllusionType>(type)), rows);
    report.types.push_back(t);
    per_category[static_cast<int>(category_of(static_cast<IllusionType>(type)))].push_back(t);
  }
  for (const auto& [cat, rows] : per_category) {
    report.categories.push_back(summarize(to_string(static_cast<IllusionCategory>(cat)), rows));
  }
  report.overall = summarize("overall", report.categories);
  return report;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string report_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "# seed=" << report.seed << '\n';
  out << "# pixel_threshold=" << format_double(report.params.pixel_threshold)
      << " mask_width=" << format_double(report.params.mask_width)
      << " iou_threshold=" << format_double(report.params.iou_threshold) << " (assumed community defaults)\n";
  out << "category,type,severity,acc_pert,acc_orig,acc_gap,f1_pert,f1_orig,f1_gap\n";
  auto line = [&](const std::string& c, const std::string& t, const std::string& s, const SummaryRow& r) {
    out << c << ',' << t << ',' << s << ',' << format_double(r.acc_perturbed) << ',' << format_double(r.acc_original) << ','
        << format_double(r.acc_gap) << ',' << format_double(r.f1_perturbed) << ',' << format_double(r.f1_original) << ','
        << format_double(r.f1_gap) << '\n';
  };
  if (report.rows.empty()) {
    out << "original,original,," << ',' << format_double(report.original_accuracy) << ",,," << format_double(report.original_f1)
        << ",\n";
    return out.str();
  }
  for (const ReportRow& r : report.rows) {
    line(to_string(r.category), to_string(r.type), std::to_string(r.severity),
         {"", r.acc_perturbed, r.acc_original, r.acc_gap, r.f1_perturbed, r.f1_original, r.f1_gap});
  }
  for (const SummaryRow& t : report.types) line(to_string(category_of(parse_illusion_type(t.label))), t.label, "all", t);
  for (const SummaryRow& c : report.categories) line(c.label, "all", "all", c);
  if (report.overall) line("overall", "all", "all", *report.overall);
  return out.str();
}

std::string category_svg(const MetricsReport& report, IllusionCategory category) {
  std::vector<const SummaryRow*> types;
  for (const SummaryRow& t : report.types) {
    if (category_of(parse_illusion_type(t.label)) == category) types.push_back(&t);
  }
  const int bar = 28, group = 2 * bar + 30, left = 60, top = 40, height = 240;
  const int width = left + 20 + group * static_cast<int>(std::max<std::size_t>(types.size(), 1));
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << top + height + 60 << "\">\n";
  s << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << svg_escape(to_string(category))
    << ": accuracy, original vs perturbed</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + height << "\" x2=\"" << width - 10 << "\" y2=\"" << top + height
    << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const int y = top + height - tick * height / 4;
    s << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
      << tick * 25 << "%</text>\n";
  }
  for (std::size_t i = 0; i < types.size(); ++i) {
    const int x = left + 15 + static_cast<int>(i) * group;
    const double vals[2] = {types[i]->acc_original, types[i]->acc_perturbed};
    const char* colors[2] = {"#4a7ab5", "#d0603a"};
    for (int k = 0; k < 2; ++k) {
      const int h = static_cast<int>(std::lround(std::clamp(vals[k], 0.0, 1.0) * height));
      s << "<rect x=\"" << x + k * bar << "\" y=\"" << top + height - h << "\" width=\"" << bar - 2 << "\" height=\"" << h
        << "\" fill=\"" << colors[k] << "\"/>\n";
    }
    char gap[32];
    std::snprintf(gap, sizeof(gap), "%+.2f%%", 100.0 * types[i]->acc_gap);
    s << "<text x=\"" << x + bar << "\" y=\"" << top + height + 16
      << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << svg_escape(types[i]->label) << "</text>\n";
    s << "<text x=\"" << x + bar << "\" y=\"" << top + height + 30
      << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << gap << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_report(const std::filesystem::path& dir, const MetricsReport& report) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "metrics.csv", std::ios::binary) << report_csv(report);
  for (IllusionCategory c : all_categories()) {
    if (!report.category(c)) continue;
    std::ofstream(dir / ("chart_" + to_string(c) + ".svg"), std::ios::binary) << category_svg(report, c);
  }
}

}  // namespace lanebench
