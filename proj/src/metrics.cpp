/* Copyright 2026 The occmatch Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#include "occmatch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>

#include "occmatch/error.hpp"

namespace occmatch {

namespace {

// Distances of the optimally matched (prediction, ground truth) pairs.
std::vector<double> MatchedDistances(std::span<const Point2> preds, std::span<const Point2> gts) {
  std::vector<double> out;
  if (preds.empty() || gts.empty()) return out;
  const bool gts_as_rows = gts.size() <= preds.size();
  const auto rows = gts_as_rows ? gts : preds;
  const auto cols = gts_as_rows ? preds : gts;
  CostMatrix cost;
  cost.rows = static_cast<int>(rows.size());
  cost.cols = static_cast<int>(cols.size());
  cost.entries.reserve(rows.size() * cols.size());
  for (const Point2& r : rows) {
    for (const Point2& c : cols) cost.entries.push_back(Distance(r, c));
  }
  const Assignment a = HungarianSolve(cost);
  for (int c = 0; c < cost.cols; ++c) {
    if (a.sigma[c] != kNoObject) out.push_back(cost(a.sigma[c], c));
  }
  return out;
}

double Ratio(std::int64_t num, std::int64_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

constexpr double kConfident = 30.0;

}  // namespace

std::vector<ConfusionMatrix> ThresholdConfusions(std::span<const Point2> predicted_positives,
                                                 std::span<const Point2> gts,
                                                 std::int64_t all_anchor_count,
                                                 std::span<const double> thresholds) {
  for (double d : thresholds) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::kInvalidConfig, "distance threshold must be finite and >= 0");
    }
  }
  const auto p = static_cast<std::int64_t>(predicted_positives.size());
  const auto g = static_cast<std::int64_t>(gts.size());
  const std::vector<double> dist = MatchedDistances(predicted_positives, gts);
  std::vector<ConfusionMatrix> out;
  out.reserve(thresholds.size());
  for (double d : thresholds) {
    ConfusionMatrix cm;
    cm.tp = std::count_if(dist.begin(), dist.end(), [d](double x) { return x <= d; });
    cm.fp = p - cm.tp;
    cm.fn = g - cm.tp;
    cm.tn = all_anchor_count - cm.tp - cm.fp - cm.fn;
    if (cm.tn < 0) {
      throw Error(ErrorCode::kInvalidCount,
                  "anchor count " + std::to_string(all_anchor_count) + " is below tp+fp+fn = " +
                      std::to_string(cm.tp + cm.fp + cm.fn));
    }
    out.push_back(cm);
  }
  return out;
}

ConfusionMatrix ThresholdConfusion(std::span<const Point2> predicted_positives,
                                   std::span<const Point2> gts, std::int64_t all_anchor_count,
                                   double d) {
  const double thresholds[1] = {d};
  return ThresholdConfusions(predicted_positives, gts, all_anchor_count, thresholds).front();
}

double Mcc(const ConfusionMatrix& cm) {
  const double tp = static_cast<double>(cm.tp);
  const double fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn);
  const double tn = static_cast<double>(cm.tn);
  const double a = tp + fp;
  const double b = tp + fn;
  const double c = tn + fp;
  const double d = tn + fn;
  if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0) return 0.0;
  const double value = (tp * tn - fp * fn) / (std::sqrt(a) * std::sqrt(b) * std::sqrt(c) * std::sqrt(d));
  return std::clamp(value, -1.0, 1.0);
}

AuxiliaryRates ComputeAuxiliaryRates(const ConfusionMatrix& cm) {
  AuxiliaryRates r;
  r.sensitivity = Ratio(cm.tp, cm.tp + cm.fn, r.degenerate);
  r.specificity = Ratio(cm.tn, cm.tn + cm.fp, r.degenerate);
  r.precision = Ratio(cm.tp, cm.tp + cm.fp, r.degenerate);
  r.npv = Ratio(cm.tn, cm.tn + cm.fn, r.degenerate);
  if (r.precision + r.sensitivity > 0.0) {
    r.f1 = 2.0 * r.precision * r.sensitivity / (r.precision + r.sensitivity);
  } else {
    r.f1 = 0.0;
    r.degenerate = true;
  }
  return r;
}

TrajectoryErrors ComputeTrajectoryErrors(const std::vector<std::vector<Point2>>& modes,
                                         std::span<const Point2> gt_future, bool occluded) {
  if (modes.empty() || gt_future.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "trajectory errors need at least one mode and step");
  }
  TrajectoryErrors e;
  e.occluded = occluded;
  e.min_ade = std::numeric_limits<double>::infinity();
  e.min_fde = std::numeric_limits<double>::infinity();
  for (const auto& mode : modes) {
    if (mode.size() != gt_future.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "mode has " + std::to_string(mode.size()) + " steps, ground truth " +
                      std::to_string(gt_future.size()));
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < mode.size(); ++t) sum += Distance(mode[t], gt_future[t]);
    e.min_ade = std::min(e.min_ade, sum / static_cast<double>(mode.size()));
    e.min_fde = std::min(e.min_fde, Distance(mode.back(), gt_future.back()));
  }
  return e;
}

void EvalOptions::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (thresholds.empty()) fail("at least one distance threshold is required");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0) || !std::isfinite(thresholds[i])) {
      fail("distance thresholds must be finite and >= 0");
    }
    if (i > 0 && thresholds[i] < thresholds[i - 1]) fail("distance thresholds must be ascending");
  }
  if (!(occupancy_threshold >= 0.0 && occupancy_threshold < 1.0)) {
    fail("occupancy threshold must lie in [0, 1)");
  }
  if (!(rates_threshold >= 0.0) || !std::isfinite(rates_threshold)) {
    fail("rates threshold must be finite and >= 0");
  }
  if (!(lambda_pos >= 0.0) || !(lambda_class >= 0.0)) fail("matching weights must be >= 0");
}

SceneMetrics EvaluateScene(const PreparedScene& scene, const PredictionSet& preds,
                           const EvalOptions& options) {
  preds.Validate();
  if (preds.size() != scene.anchors.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "predictions cover " + std::to_string(preds.size()) + " anchors, scene has " +
                    std::to_string(scene.anchors.size()));
  }
  SceneMetrics m;
  m.occlusion_level = scene.scene.occlusion_level;
  m.gt_agents = static_cast<std::int64_t>(scene.gts.size());

  const auto& visible_now = scene.mask.cell_visible[kPredictionStep];
  std::int64_t evaluated = 0;
  std::vector<Point2> positives;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    const bool positive = OccupancyProbability(preds.class_logits[n]) > options.occupancy_threshold;
    if (positive) ++m.positives;
    const int cell = scene.anchors.anchors[n].cell;
    if (cell < 0 || visible_now[cell]) continue;
    ++evaluated;
    if (positive) positives.push_back(preds.Position(n));
  }
  std::vector<Point2> hidden;
  for (const auto& gt : scene.gts) {
    if (gt.occluded) hidden.push_back(gt.position);
  }
  // A predictor that fires on nearly every occluded anchor would leave no
  // room for false negatives; widen the universe so tn stays >= 0.
  const auto universe = std::max<std::int64_t>(
      evaluated, static_cast<std::int64_t>(positives.size() + hidden.size()));
  m.confusion = ThresholdConfusions(positives, hidden, universe, options.thresholds);

  if (!scene.gts.empty()) {
    const Assignment a = Match(preds, scene.gts, options.lambda_pos, options.lambda_class);
    const auto owner = a.PredictionForGroundTruth(static_cast<int>(scene.gts.size()));
    for (std::size_t g = 0; g < scene.gts.size(); ++g) {
      const auto& gt = scene.gts[g];
      if (static_cast<int>(gt.future.size()) < preds.horizon) {
        throw Error(ErrorCode::kShapeMismatch, "ground-truth future shorter than the horizon");
      }
      m.trajectories.push_back(ComputeTrajectoryErrors(
          GlobalModes(preds, owner[g]),
          std::span<const Point2>(gt.future.data(), preds.horizon), gt.occluded));
    }
  }
  return m;
}

std::vector<double> MccAtThresholds(std::span<const SceneMetrics> scenes,
                                    std::size_t threshold_count) {
  std::vector<ConfusionMatrix> sum(threshold_count);
  for (const auto& s : scenes) {
    if (s.confusion.size() != threshold_count) {
      throw Error(ErrorCode::kShapeMismatch, "scene metrics use a different threshold list");
    }
    for (std::size_t k = 0; k < threshold_count; ++k) sum[k] += s.confusion[k];
  }
  std::vector<double> out;
  for (const auto& cm : sum) out.push_back(Mcc(cm));
  return out;
}

std::vector<MetricsRow> AggregateMetrics(std::span<const SceneMetrics> scenes,
                                         const EvalOptions& options) {
  std::map<double, std::vector<const SceneMetrics*>> groups;
  for (const auto& s : scenes) groups[s.occlusion_level].push_back(&s);

  const auto rates_it = std::find(options.thresholds.begin(), options.thresholds.end(),
                                  options.rates_threshold);
  const std::size_t rates_index =
      rates_it != options.thresholds.end()
          ? static_cast<std::size_t>(rates_it - options.thresholds.begin())
          : options.thresholds.size() - 1;

  std::vector<MetricsRow> rows;
  for (const auto& [level, members] : groups) {
    MetricsRow row;
    row.occlusion_level = level;
    row.scene_count = members.size();
    std::vector<ConfusionMatrix> sum(options.thresholds.size());
    std::vector<double> ade_occ, ade_obs, fde_occ, fde_obs;
    std::int64_t positives = 0;
    std::int64_t agents = 0;
    for (const SceneMetrics* s : members) {
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += s->confusion.at(k);
      for (const auto& t : s->trajectories) {
        (t.occluded ? ade_occ : ade_obs).push_back(t.min_ade);
        (t.occluded ? fde_occ : fde_obs).push_back(t.min_fde);
      }
      positives += s->positives;
      agents += s->gt_agents;
    }
    for (const auto& cm : sum) row.mcc.push_back(Mcc(cm));
    row.rates = ComputeAuxiliaryRates(sum[rates_index]);
    row.min_ade_occluded = Mean(ade_occ);
    row.min_ade_observed = Mean(ade_obs);
    row.min_fde_occluded = Mean(fde_occ);
    row.min_fde_observed = Mean(fde_obs);
    row.redundancy = agents == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(agents);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string FormatMetricsCsv(std::span<const MetricsRow> rows, std::span<const double> thresholds) {
  char buf[64];
  std::string out = "occlusion_level";
  for (double d : thresholds) {
    std::snprintf(buf, sizeof buf, ",mcc@%g", d);
    out += buf;
  }
  out += ",sensitivity,specificity,precision,npv,f1,minADE_occ,minADE_obs,minFDE_occ,minFDE_obs,"
         "redundancy\n";
  auto field = [&](double v, bool first = false) {
    std::snprintf(buf, sizeof buf, first ? "%.6f" : ",%.6f", v);
    out += buf;
  };
  for (const auto& row : rows) {
    field(row.occlusion_level, true);
    for (double v : row.mcc) field(v);
    field(row.rates.sensitivity);
    field(row.rates.specificity);
    field(row.rates.precision);
    field(row.rates.npv);
    field(row.rates.f1);
    field(row.min_ade_occluded);
    field(row.min_ade_observed);
    field(row.min_fde_occluded);
    field(row.min_fde_observed);
    field(row.redundancy);
    out += '\n';
  }
  return out;
}

PredictionSet NullPredictions(const PreparedScene& scene, int modes, int horizon) {
  PredictionSet preds = PredictionSet::Zeros(scene.features.anchors, modes, horizon);
  for (std::size_t n = 0; n < preds.size(); ++n) {
    preds.class_logits[n] = {0.0, 0.0, 0.0, kConfident};
    preds.heading_raw[n] = {1.0, 0.0};
  }
  return preds;
}

PredictionSet OraclePredictions(const PreparedScene& scene, int modes, int horizon) {
  PredictionSet preds = NullPredictions(scene, modes, horizon);
  const auto& anchors = scene.anchors.anchors;
  const Grid& grid = scene.mask.grid;
  std::vector<bool> used(anchors.size(), false);
  for (const auto& gt : scene.gts) {
    int chosen = -1;
    const auto cell = grid.CellOf(gt.position);
    for (std::size_t n = 0; n < anchors.size() && chosen < 0; ++n) {
      if (used[n]) continue;
      const Anchor& a = anchors[n];
      if (gt.occluded ? (a.source == AnchorSource::kOccludedGrid && cell && a.cell == *cell)
                      : (a.source == AnchorSource::kObservedAgent &&
                         a.agent_index == gt.agent_index)) {
        chosen = static_cast<int>(n);
      }
    }
    if (chosen < 0) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t n = 0; n < anchors.size(); ++n) {
        const double d = Distance(anchors[n].position, gt.position);
        if (!used[n] && d < best) {
          best = d;
          chosen = static_cast<int>(n);
        }
      }
    }
    if (chosen < 0) throw Error(ErrorCode::kShapeMismatch, "more ground truths than anchors");
    used[chosen] = true;

    ClassLogits z{0.0, 0.0, 0.0, 0.0};
    z[static_cast<int>(gt.cls)] = kConfident;
    preds.class_logits[chosen] = z;
    preds.delta[chosen] = gt.position - anchors[chosen].position;
    preds.heading_raw[chosen] = {gt.heading.c, gt.heading.s};
    preds.ModeLogits(chosen)[0] = kConfident;
    auto steps = preds.Mode(chosen, 0);
    Point2 prev = gt.position;
    for (int t = 0; t < horizon && t < static_cast<int>(gt.future.size()); ++t) {
      steps[t] = RotateGlobalToLocal(gt.future[t] - prev, gt.heading);
      prev = gt.future[t];
    }
  }
  return preds;
}

}  // namespace occmatch
