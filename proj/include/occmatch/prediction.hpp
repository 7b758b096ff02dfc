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


#ifndef OCCMATCH_PREDICTION_HPP_
#define OCCMATCH_PREDICTION_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "occmatch/geom.hpp"
#include "occmatch/scene.hpp"

namespace occmatch {

using ClassLogits = std::array<double, kNumClasses>;

// Per-anchor head outputs, stored structure-of-arrays. Trajectory modes are
// per-step displacements in the agent frame; global positions come from
// rotating them by the predicted heading and accumulating from anchor + delta.
struct PredictionSet {
  int modes = 1;               // M
  int horizon = kFutureSteps;  // T
  std::vector<Point2> anchors;
  std::vector<ClassLogits> class_logits;
  std::vector<Point2> delta;
  std::vector<Point2> heading_raw;  // (cos, sin) before normalization
  std::vector<double> mode_logits;     // size * modes
  std::vector<Point2> displacements;   // size * modes * horizon

  // Zero-initialised outputs for the given anchors.
  static PredictionSet Zeros(std::vector<Point2> anchors, int modes, int horizon);

  std::size_t size() const { return anchors.size(); }
  Point2 Position(std::size_t n) const { return anchors[n] + delta[n]; }

  std::span<const double> ModeLogits(std::size_t n) const {
    return {mode_logits.data() + n * modes, static_cast<std::size_t>(modes)};
  }
  std::span<double> ModeLogits(std::size_t n) {
    return {mode_logits.data() + n * modes, static_cast<std::size_t>(modes)};
  }
  std::span<const Point2> Mode(std::size_t n, int m) const {
    return {displacements.data() + (n * modes + m) * horizon, static_cast<std::size_t>(horizon)};
  }
  std::span<Point2> Mode(std::size_t n, int m) {
    return {displacements.data() + (n * modes + m) * horizon, static_cast<std::size_t>(horizon)};
  }

  // Throws Error(kShapeMismatch) when the arrays disagree or hold non-finite
  // values.
  void Validate() const;
};

// Softmax class probabilities of one anchor.
std::array<double, kNumClasses> ClassProbabilities(const ClassLogits& logits);

// 1 - P(NoClass).
double OccupancyProbability(const ClassLogits& logits);

// Below this norm the heading normalization switches to a fixed divisor so
// its Jacobian stays bounded.
inline constexpr double kHeadingClipNorm = 1e-6;

// raw / max(|raw|, clip): the heading the losses and the decoder use. Unit
// length unless raw is inside the clip radius.
HeadingVec ClippedHeading(Point2 raw, double clip = kHeadingClipNorm);

// Global-frame positions of one mode: start + cumulative rotated steps.
std::vector<Point2> GlobalTrajectory(std::span<const Point2> local_steps, HeadingVec heading,
                                     Point2 start);

// Every mode of anchor n in the global frame, [mode][step].
std::vector<std::vector<Point2>> GlobalModes(const PredictionSet& preds, std::size_t n);

}  // namespace occmatch

#endif  // OCCMATCH_PREDICTION_HPP_
