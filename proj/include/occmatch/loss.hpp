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


// Training losses: the matched set-prediction loss (class cross-entropy,
// positional MSE plus heading cosine gap, winner-takes-all trajectory loss)
// with analytic gradients, and the exact-cell weighted occupancy
// cross-entropy baseline.

#ifndef OCCMATCH_LOSS_HPP_
#define OCCMATCH_LOSS_HPP_

#include <span>
#include <string>
#include <vector>

#include "occmatch/assign.hpp"
#include "occmatch/prediction.hpp"
#include "occmatch/scene.hpp"

namespace occmatch {

struct LossWeights {
  double class_weight = 1.0;  // omega_1
  double pos_weight = 1.0;    // omega_2
  double traj_weight = 1.0;   // omega_3
};

inline constexpr double kDefaultPositiveWeight = 50.0;

double ClassLoss(const ClassLogits& logits, AgentClass target);

// MSE(anchor + delta, gt) + (1 - u_hat . u_gt). Throws kDegenerateHeading.
double PositionalLoss(Point2 anchor, Point2 delta, Point2 heading_raw, Point2 gt_pos,
                      HeadingVec gt_heading);

struct TrajectoryLossResult {
  double loss = 0.0;
  int best_mode = 0;
  double mode_ce = 0.0;
  double regression = 0.0;  // mean per-step MSE of the best mode
};

// modes holds M * T local per-step displacements (mode-major).
TrajectoryLossResult TrajectoryLoss(std::span<const Point2> modes, int mode_count,
                                    std::span<const double> mode_logits, HeadingVec heading,
                                    Point2 start, std::span<const Point2> gt_future);

struct LossBreakdown {
  double class_loss = 0.0;  // unweighted sums over anchors
  double pos_loss = 0.0;
  double traj_loss = 0.0;
  double total = 0.0;
  std::vector<double> anchor_class;
  std::vector<double> anchor_pos;
  std::vector<double> anchor_traj;
  std::vector<int> best_mode;  // -1 for anchors without a target
};

struct LossGradients {
  std::vector<ClassLogits> class_logits;
  std::vector<Point2> delta;
  std::vector<Point2> heading_raw;
  std::vector<double> mode_logits;
  std::vector<Point2> displacements;

  static LossGradients ZerosLike(const PredictionSet& preds);
};

// How anchors with a target are scored by the class term.
struct ClassTermOptions {
  enum class Kind { kCategorical, kWeightedOccupancy } kind = Kind::kCategorical;
  double positive_weight = kDefaultPositiveWeight;  // kWeightedOccupancy only
};

// Shared evaluator. targets[n] is a ground-truth index or kNoObject; several
// anchors may share a target (the exact-cell baseline does this). When grads
// is non-null it receives d total / d outputs, overwriting its contents.
LossBreakdown EvaluateLoss(const PredictionSet& preds, std::span<const GroundTruth> gts,
                           std::span<const int> targets, const LossWeights& weights,
                           const ClassTermOptions& class_term, LossGradients* grads);

// Matched loss over an assignment.
LossBreakdown TotalLoss(const PredictionSet& preds, std::span<const GroundTruth> gts,
                        const Assignment& sigma, const LossWeights& weights = {});
LossGradients TotalLossGradients(const PredictionSet& preds, std::span<const GroundTruth> gts,
                                 const Assignment& sigma, const LossWeights& weights = {});

// Exact-cell pairing: an anchor targets the ground truth lying in its grid
// cell (the nearest one if several do), otherwise kNoObject.
std::vector<int> ExactCellTargets(const PredictionSet& preds, std::span<const GroundTruth> gts,
                                  const Grid& grid);

// Binary occupied/free cross-entropy with occupied targets weighted by
// positive_weight; occupancy probability is 1 - P(NoClass).
double ExactMatchWeightedCe(const PredictionSet& preds, std::span<const GroundTruth> gts,
                            const Grid& grid, double positive_weight = kDefaultPositiveWeight);

// Three canonical one-car scenes on a 5 x 5 anchor patch: (a) the exact
// anchor fires, (b) a neighbouring anchor fires instead, (c) the exact anchor
// and its four neighbours fire.
struct CaseAnchor {
  Point2 position;
  double occupancy = 0.0;
  bool matched_target = false;  // occupied under the assignment
  bool exact_target = false;    // occupied under exact-cell pairing
  double with_matching = 0.0;
  double without_matching = 0.0;
  double matched_loss_term = 0.0;  // full per-anchor matched-loss term
};

struct LossCase {
  std::string name;
  double with_matching = 0.0;     // weighted CE under the assignment + positional term
  double without_matching = 0.0;  // weighted CE under exact-cell targets
  double positional_term = 0.0;
  double matched_loss = 0.0;      // TotalLoss with default weights
  int matched_anchor = -1;
  std::vector<CaseAnchor> anchors;
};

struct LossCaseReport {
  std::vector<LossCase> cases;  // a, b, c
  bool ordering_holds = false;
  std::string ToText() const;
};

LossCaseReport RunLossCaseStudy();

}  // namespace occmatch

#endif  // OCCMATCH_LOSS_HPP_
