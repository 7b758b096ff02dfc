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


// Small worked scenarios and their vector-graphic renderings.

#ifndef OCCMATCH_DEMO_HPP_
#define OCCMATCH_DEMO_HPP_

#include <span>
#include <string>
#include <vector>

#include "occmatch/loss.hpp"
#include "occmatch/model.hpp"

namespace occmatch {

// One car at the origin and two candidate anchors: A on the car with car
// probability 0.2, B 1.5 m away with car probability 0.9.
struct CostFlipRow {
  double lambda_pos = 0.0;
  double lambda_class = 0.0;
  double cost_a = 0.0;
  double cost_b = 0.0;
  int matched = -1;  // 0 = A, 1 = B
};

struct CostFlipReport {
  std::vector<CostFlipRow> rows;
  std::string ToText() const;
};

PredictionSet CostFlipPredictions();
std::vector<GroundTruth> CostFlipGroundTruth();
CostFlipReport RunCostFlip(std::span<const double> lambda_class_values,
                           double lambda_pos = kDefaultLambdaPos);

std::string RenderCostFlipSvg(const CostFlipReport& report);
std::string RenderLossCasesSvg(const LossCaseReport& report);

// Visibility shading at t = 0, obstacles, agent footprints, anchors shaded
// white to red by occupancy and the most likely mode of every positive anchor.
std::string RenderSceneSvg(const ScenePrediction& prediction, double occupancy_threshold = 0.5);

}  // namespace occmatch

#endif  // OCCMATCH_DEMO_HPP_
