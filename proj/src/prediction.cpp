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


#include "occmatch/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "occmatch/error.hpp"
#include "occmatch/numerics.hpp"

namespace occmatch {

PredictionSet PredictionSet::Zeros(std::vector<Point2> anchors, int modes, int horizon) {
  PredictionSet p;
  p.modes = modes;
  p.horizon = horizon;
  const std::size_t n = anchors.size();
  p.anchors = std::move(anchors);
  p.class_logits.assign(n, ClassLogits{});
  p.delta.assign(n, Point2{});
  p.heading_raw.assign(n, Point2{});
  p.mode_logits.assign(n * modes, 0.0);
  p.displacements.assign(n * modes * horizon, Point2{});
  return p;
}

void PredictionSet::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kShapeMismatch, "prediction set: " + what);
  };
  if (modes < 1) fail("modes must be >= 1");
  if (horizon < 1) fail("horizon must be >= 1");
  const std::size_t n = anchors.size();
  if (class_logits.size() != n || delta.size() != n || heading_raw.size() != n) {
    fail("per-anchor arrays disagree in length");
  }
  if (mode_logits.size() != n * modes) fail("mode_logits has the wrong length");
  if (displacements.size() != n * modes * horizon) fail("displacements has the wrong length");
  auto finite = [](Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); };
  for (std::size_t i = 0; i < n; ++i) {
    if (!finite(anchors[i]) || !finite(delta[i]) || !finite(heading_raw[i])) {
      fail("non-finite value at anchor " + std::to_string(i));
    }
    for (double z : class_logits[i]) {
      if (!std::isfinite(z)) fail("non-finite class logit at anchor " + std::to_string(i));
    }
  }
  for (double z : mode_logits) {
    if (!std::isfinite(z)) fail("non-finite mode logit");
  }
  for (const auto& d : displacements) {
    if (!finite(d)) fail("non-finite displacement");
  }
}

std::array<double, kNumClasses> ClassProbabilities(const ClassLogits& logits) {
  std::array<double, kNumClasses> p{};
  Softmax(logits, p);
  return p;
}

double OccupancyProbability(const ClassLogits& logits) {
  return 1.0 - ClassProbabilities(logits)[static_cast<int>(AgentClass::kNoClass)];
}

HeadingVec ClippedHeading(Point2 raw, double clip) {
  const double d = std::max(Norm(raw), clip);
  return {raw.x / d, raw.y / d};
}

std::vector<Point2> GlobalTrajectory(std::span<const Point2> local_steps, HeadingVec heading,
                                     Point2 start) {
  std::vector<Point2> out;
  out.reserve(local_steps.size());
  Point2 p = start;
  for (const auto& d : local_steps) {
    p = p + RotateLocalToGlobal(d, heading);
    out.push_back(p);
  }
  return out;
}

std::vector<std::vector<Point2>> GlobalModes(const PredictionSet& preds, std::size_t n) {
  const HeadingVec h = ClippedHeading(preds.heading_raw[n]);
  std::vector<std::vector<Point2>> out;
  out.reserve(preds.modes);
  for (int m = 0; m < preds.modes; ++m) {
    out.push_back(GlobalTrajectory(preds.Mode(n, m), h, preds.Position(n)));
  }
  return out;
}

}  // namespace occmatch
