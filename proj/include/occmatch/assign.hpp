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


// Optimal one-to-one assignment of predictions to ground-truth agents.

#ifndef OCCMATCH_ASSIGN_HPP_
#define OCCMATCH_ASSIGN_HPP_

#include <span>
#include <vector>

#include "occmatch/prediction.hpp"
#include "occmatch/scene.hpp"

namespace occmatch {

inline constexpr int kNoObject = -1;

inline constexpr double kDefaultLambdaPos = 1.0;
inline constexpr double kDefaultLambdaClass = 3.0;

// |G| x |N| costs, row-major: rows are ground-truth agents, columns are
// predictions.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> entries;
  double lambda_pos = kDefaultLambdaPos;
  double lambda_class = kDefaultLambdaClass;

  double operator()(int g, int n) const { return entries[static_cast<std::size_t>(g) * cols + n]; }
  double& operator()(int g, int n) { return entries[static_cast<std::size_t>(g) * cols + n]; }

  // Throws Error(kDimensionMismatch) on a bad shape or non-finite entries.
  static CostMatrix FromRows(const std::vector<std::vector<double>>& rows);
};

struct Assignment {
  std::vector<int> sigma;  // per prediction: ground-truth index or kNoObject
  double total_cost = 0.0;

  // Prediction index matched to each ground truth (size |G|).
  std::vector<int> PredictionForGroundTruth(int gt_count) const;
};

// C[g][n] = lambda_pos * |anchor_n + delta_n - p_g| - lambda_class * P_n(class_g).
CostMatrix BuildCostMatrix(const PredictionSet& preds, std::span<const GroundTruth> gts,
                           double lambda_pos = kDefaultLambdaPos,
                           double lambda_class = kDefaultLambdaClass);

// Rectangular linear assignment by shortest augmenting paths with row/column
// potentials, O(|G|^2 |N|). Requires |G| <= |N|. Ties go to the lower
// prediction index within each augmentation.
Assignment HungarianSolve(const CostMatrix& cost);

Assignment Match(const PredictionSet& preds, std::span<const GroundTruth> gts,
                 double lambda_pos = kDefaultLambdaPos,
                 double lambda_class = kDefaultLambdaClass);

}  // namespace occmatch

#endif  // OCCMATCH_ASSIGN_HPP_
