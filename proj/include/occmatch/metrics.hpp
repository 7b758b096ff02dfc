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


// Occupancy confusion counts, Matthews correlation and displacement errors.

#ifndef OCCMATCH_METRICS_HPP_
#define OCCMATCH_METRICS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "occmatch/assign.hpp"
#include "occmatch/model.hpp"

namespace occmatch {

struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t Total() const { return tp + fp + fn + tn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

// One-to-one matching of predicted positives to ground truths minimizing the
// summed distance; matched pairs within d are true positives. Throws
// Error(kInvalidCount) when all_anchor_count < tp + fp + fn and
// Error(kInvalidConfig) for negative or non-finite d.
ConfusionMatrix ThresholdConfusion(std::span<const Point2> predicted_positives,
                                   std::span<const Point2> gts, std::int64_t all_anchor_count,
                                   double d);

// Same, for several thresholds sharing one matching.
std::vector<ConfusionMatrix> ThresholdConfusions(std::span<const Point2> predicted_positives,
                                                 std::span<const Point2> gts,
                                                 std::int64_t all_anchor_count,
                                                 std::span<const double> thresholds);

// 0 when any marginal product term is zero.
double Mcc(const ConfusionMatrix& cm);

struct AuxiliaryRates {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double npv = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // some ratio was 0/0 and reported as 0
};
AuxiliaryRates ComputeAuxiliaryRates(const ConfusionMatrix& cm);

struct TrajectoryErrors {
  double min_ade = 0.0;
  double min_fde = 0.0;
  bool occluded = false;
};

// modes[m][t] against gt_future[t]; ADE and FDE minimize over modes
// independently. Throws Error(kShapeMismatch).
TrajectoryErrors ComputeTrajectoryErrors(const std::vector<std::vector<Point2>>& modes,
                                         std::span<const Point2> gt_future, bool occluded);

inline const std::vector<double> kDefaultThresholds = {0.0, 1.0, 2.0, 3.0, 4.0};

struct EvalOptions {
  std::vector<double> thresholds = kDefaultThresholds;
  double occupancy_threshold = 0.5;
  double rates_threshold = 2.0;  // distance threshold behind the auxiliary rates
  double lambda_pos = kDefaultLambdaPos;
  double lambda_class = kDefaultLambdaClass;

  void Validate() const;  // throws kInvalidConfig
};

// Counts restricted to the occluded area: anchors lying in cells occluded at
// t = 0 and agents unobserved at t = 0. A positive anchor is placed at
// anchor + delta. The anchor universe is max(evaluated anchors, positives +
// hidden agents).
struct SceneMetrics {
  double occlusion_level = 0.0;
  std::vector<ConfusionMatrix> confusion;  // per threshold
  std::vector<TrajectoryErrors> trajectories;  // per ground truth
  std::int64_t positives = 0;  // over all anchors
  std::int64_t gt_agents = 0;
};

SceneMetrics EvaluateScene(const PreparedScene& scene, const PredictionSet& preds,
                           const EvalOptions& options);

// MCC per threshold over summed confusion counts.
std::vector<double> MccAtThresholds(std::span<const SceneMetrics> scenes,
                                    std::size_t threshold_count);

struct MetricsRow {
  double occlusion_level = 0.0;
  std::vector<double> mcc;  // per threshold
  AuxiliaryRates rates;
  double min_ade_occluded = 0.0;  // NaN without agents in the split
  double min_ade_observed = 0.0;
  double min_fde_occluded = 0.0;
  double min_fde_observed = 0.0;
  double redundancy = 0.0;  // predicted positives per ground-truth agent
  std::size_t scene_count = 0;
};

// One row per distinct occlusion level, ascending.
std::vector<MetricsRow> AggregateMetrics(std::span<const SceneMetrics> scenes,
                                         const EvalOptions& options);

std::string FormatMetricsCsv(std::span<const MetricsRow> rows, std::span<const double> thresholds);

// Test predictors. The oracle places one confident positive per ground truth
// (its grid anchor when occluded, its own anchor otherwise) with exact offset,
// heading and a first mode reproducing the future; the null predictor says
// NoClass everywhere.
PredictionSet OraclePredictions(const PreparedScene& scene, int modes, int horizon);
PredictionSet NullPredictions(const PreparedScene& scene, int modes, int horizon);

}  // namespace occmatch

#endif  // OCCMATCH_METRICS_HPP_
