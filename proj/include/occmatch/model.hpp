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


// Desk-scale predictor: engineered per-anchor context features feeding four
// small MLP heads (class, position/heading, mode probabilities, trajectory
// modes), trained end to end with matched or exact-cell targets.

#ifndef OCCMATCH_MODEL_HPP_
#define OCCMATCH_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occmatch/assign.hpp"
#include "occmatch/loss.hpp"
#include "occmatch/prediction.hpp"
#include "occmatch/scene.hpp"

namespace occmatch {

// Feature layout. "Subject" is the agent an anchor most plausibly stands
// for: its own agent when the anchor is a fresh observation, otherwise the
// nearest constant-velocity extrapolation of an agent that was observed and
// is now hidden.
namespace feature {
inline constexpr int kEgoX = 0;            // anchor position, ego frame, / 30 m
inline constexpr int kEgoY = 1;
inline constexpr int kOccluded = 2;        // anchor cell occluded at t = 0
inline constexpr int kFromAgent = 3;       // anchor is a last observed agent position
inline constexpr int kFresh = 4;           // ... and that agent is still observed at t = 0
inline constexpr int kSubjectClass = 5;    // 3 entries: car, pedestrian, bicycle
inline constexpr int kSubjectHeading = 8;  // 2 entries, ego frame
inline constexpr int kSubjectSpeed = 10;   // / 10 m/s
inline constexpr int kSubjectYawRate = 11; // rad/s
inline constexpr int kSubjectOffset = 12;  // 2 entries, subject point - anchor, ego frame, / cap
inline constexpr int kSubjectDistance = 14;  // / cap, 1 when no subject
inline constexpr int kSinceObserved = 15;  // seconds
inline constexpr int kSubjectInCell = 16;  // subject point falls in the anchor's cell
inline constexpr int kOccludedDensity = 17;  // occluded share of the 3 x 3 neighbourhood
inline constexpr int kCount = 18;
}  // namespace feature

inline constexpr double kSubjectDistanceCap = 8.0;

struct AnchorFeatures {
  std::vector<Point2> anchors;  // global positions
  HeadingVec ego_heading;       // ego-frame <-> global conversion
  int dim = feature::kCount;
  std::vector<double> values;   // anchors.size() x dim, row-major

  std::span<const double> Row(std::size_t n) const {
    return {values.data() + n * dim, static_cast<std::size_t>(dim)};
  }
};

// Constant-velocity position at t = 0 from the last two observations, or
// the last observed position when only one exists.
Point2 ExtrapolateToPredictionTime(const Scene& scene, const VisibilityMask& mask,
                                   int agent_index);

AnchorFeatures ExtractFeatures(const Scene& scene, const VisibilityMask& mask,
                               const AnchorSet& anchors);

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weight;  // out x in, row-major
  std::vector<double> bias;
};

// tanh on every hidden layer, identity on the last.
struct Mlp {
  std::vector<DenseLayer> layers;

  int InputDim() const { return layers.empty() ? 0 : layers.front().in; }
  int OutputDim() const { return layers.empty() ? 0 : layers.back().out; }
};

struct HeadWeights {
  int feature_dim = feature::kCount;
  int hidden = 64;
  int modes = 6;
  int horizon = kFutureSteps;
  Mlp class_head;  // -> 4 logits
  Mlp pos_head;    // -> delta (2), heading raw (2), ego frame
  Mlp mode_head;   // -> M logits
  Mlp traj_head;   // -> M * T * 2 agent-frame step displacements

  // Seeded uniform in +-1/sqrt(fan_in), biases zero.
  static HeadWeights Initialize(int feature_dim, int hidden, int modes, int horizon,
                                std::uint64_t seed);
  void Validate() const;  // throws kShapeMismatch
  std::size_t ParameterCount() const;
};

// Throws kShapeMismatch when feats.dim differs from weights.feature_dim.
PredictionSet Forward(const HeadWeights& weights, const AnchorFeatures& feats);

enum class MatchingRegime { kHungarian, kExactWeightedCe };

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 8;
  int epochs = 30;
  std::uint64_t seed = 1;
  int modes = 6;
  int horizon = kFutureSteps;
  int hidden = 64;
  double lambda_pos = kDefaultLambdaPos;
  double lambda_class = kDefaultLambdaClass;
  LossWeights loss_weights;
  MatchingRegime regime = MatchingRegime::kHungarian;
  double positive_weight = kDefaultPositiveWeight;
  int ray_count = kDefaultRayCount;

  void Validate() const;  // throws kInvalidConfig
};

struct EpochRecord {
  int epoch = 0;
  double class_loss = 0.0;  // means over scenes
  double pos_loss = 0.0;
  double traj_loss = 0.0;
  double total = 0.0;
  std::optional<double> probe_redundancy;
};

struct TrainResult {
  HeadWeights weights;
  std::vector<EpochRecord> log;
};

// Everything training and evaluation need from one scene, computed once.
struct PreparedScene {
  Scene scene;
  VisibilityMask mask;
  AnchorSet anchors;
  AnchorFeatures features;
  std::vector<GroundTruth> gts;
};

PreparedScene PrepareScene(Scene scene, int ray_count = kDefaultRayCount, int horizon = kFutureSteps);

// Deterministic for fixed (scenes, config). Throws kNonFiniteLoss naming the
// optimizer step.
TrainResult Train(std::span<const PreparedScene> scenes, const TrainConfig& config,
                  std::span<const PreparedScene> probe = {});

// Gradient of the regime loss on one scene with respect to all weights,
// returned in the same layout as the weights. Exposed for tests.
struct SceneGradient {
  HeadWeights grad;
  LossBreakdown loss;
};
SceneGradient ComputeSceneGradient(const HeadWeights& weights, const PreparedScene& scene,
                                   const TrainConfig& config);

// Adaptive-moment optimizer over every head parameter.
class AdamOptimizer {
 public:
  AdamOptimizer(const HeadWeights& shape, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);
  void Step(HeadWeights& weights, const HeadWeights& grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  long step_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

// Visits every parameter array of the four heads in a fixed order.
template <typename Weights, typename Fn>
void ForEachParameterArray(Weights& w, Fn&& fn) {
  for (auto* head : {&w.class_head, &w.pos_head, &w.mode_head, &w.traj_head}) {
    for (auto& layer : head->layers) {
      fn(layer.weight);
      fn(layer.bias);
    }
  }
}

struct ScenePrediction {
  PreparedScene prepared;
  PredictionSet preds;
  std::vector<double> occupancy;  // 1 - P(NoClass) per anchor
};

ScenePrediction Predict(const HeadWeights& weights, const Scene& scene,
                        int ray_count = kDefaultRayCount);
ScenePrediction PredictPrepared(const HeadWeights& weights, const PreparedScene& scene);

// Global trajectories of one anchor, [mode][step].
inline std::vector<std::vector<Point2>> GlobalModes(const ScenePrediction& p, std::size_t n) {
  return GlobalModes(p.preds, n);
}

// Predicted positives (occupancy > threshold) per ground-truth agent.
double RedundancyRatio(const HeadWeights& weights, std::span<const PreparedScene> scenes,
                       double threshold = 0.5);

}  // namespace occmatch

#endif  // OCCMATCH_MODEL_HPP_
