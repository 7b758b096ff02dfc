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


#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"

#include "occmatch/error.hpp"
#include "occmatch/model.hpp"
#include "occmatch/model_io.hpp"
#include "occmatch/rng.hpp"

namespace occmatch {
namespace {

Agent Moving(int id, Point2 start, Point2 velocity) {
  Agent a;
  a.id = id;
  a.cls = AgentClass::kBicycle;
  a.length = 1.8;
  a.width = 0.6;
  for (int k = 0; k < kTotalSteps; ++k) {
    a.states.push_back({start + (k * kStepSeconds) * velocity, HeadingVec::FromAngle(0.4)});
  }
  return a;
}

Scene OpenScene(std::vector<Agent> agents) {
  Scene s;
  s.region = {-30, -30, 30, 30};
  s.agents = std::move(agents);
  return s;
}

std::vector<PreparedScene> SmallCorpus(int count, std::uint64_t seed, int horizon) {
  GeneratorConfig config;
  config.cars = 3;
  config.pedestrians = 1;
  config.bicycles = 1;
  config.region_half_extent = 15.0;
  config.spawn_half_extent = 12.0;
  config.buildings = 2;
  std::vector<PreparedScene> out;
  for (int i = 0; i < count; ++i) {
    config.occlusion_level = 0.25 * (i % 5);
    out.push_back(PrepareScene(GenerateScene(config, Rng::Derive(seed, i)), 180, horizon));
  }
  return out;
}

bool SameWeights(const HeadWeights& a, const HeadWeights& b) {
  return SerializeWeights(a) == SerializeWeights(b);
}

TEST(Features, FullyVisibleAgentsAreFreshSubjects) {
  Scene scene = OpenScene({Moving(0, {5, 0}, {1, 0}), Moving(1, {-5, 3}, {0, -1})});
  const VisibilityMask mask = ComputeVisibility(scene);
  const AnchorSet anchors = BuildAnchors(scene, mask);
  const AnchorFeatures f = ExtractFeatures(scene, mask, anchors);
  ASSERT_EQ(anchors.size(), 2u);
  for (std::size_t n = 0; n < 2; ++n) {
    const auto row = f.Row(n);
    EXPECT_EQ(row[feature::kOccluded], 0.0);
    EXPECT_EQ(row[feature::kFromAgent], 1.0);
    EXPECT_EQ(row[feature::kFresh], 1.0);
    EXPECT_EQ(row[feature::kSubjectClass + 2], 1.0);
    EXPECT_EQ(row[feature::kSubjectDistance], 0.0);
    EXPECT_EQ(row[feature::kSinceObserved], 0.0);
    EXPECT_NEAR(row[feature::kSubjectSpeed], 0.1, 1e-12);
    EXPECT_EQ(row[feature::kOccludedDensity], 0.0);
  }
}

TEST(Features, HiddenAgentExtrapolatesAtConstantVelocity) {
  const Point2 v{2.0, -1.0};
  Scene scene = OpenScene({Moving(0, {4, 6}, v)});
  // Hand-built mask: the agent is seen for steps 0..4 and every cell is
  // dark at the prediction step.
  VisibilityMask mask = ComputeVisibility(scene);
  for (int step = 5; step < kHistorySteps; ++step) {
    mask.agent_observed[0][step] = 0;
    std::fill(mask.cell_visible[step].begin(), mask.cell_visible[step].end(), 0);
  }
  const Point2 expected = scene.agents[0].states[kPredictionStep].position;
  const Point2 got = ExtrapolateToPredictionTime(scene, mask, 0);
  EXPECT_NEAR(got.x, expected.x, 1e-12);
  EXPECT_NEAR(got.y, expected.y, 1e-12);

  const AnchorSet anchors = BuildAnchors(scene, mask);
  const AnchorFeatures f = ExtractFeatures(scene, mask, anchors);
  const auto cell = mask.grid.CellOf(expected);
  ASSERT_TRUE(cell);
  bool found = false;
  for (std::size_t n = 0; n < anchors.size(); ++n) {
    if (anchors.anchors[n].cell != *cell) continue;
    if (anchors.anchors[n].source != AnchorSource::kOccludedGrid) continue;
    found = true;
    const auto row = f.Row(n);
    EXPECT_EQ(row[feature::kOccluded], 1.0);
    EXPECT_EQ(row[feature::kSubjectInCell], 1.0);
    EXPECT_NEAR(row[feature::kSinceObserved], 0.5, 1e-12);
    EXPECT_NEAR(row[feature::kSubjectDistance] * kSubjectDistanceCap,
                Distance(expected, anchors.anchors[n].position), 1e-12);
  }
  EXPECT_TRUE(found);
}

TEST(Features, NeverObservedAgentIsRejected) {
  Scene scene = OpenScene({Moving(0, {4, 6}, {0, 0})});
  VisibilityMask mask = ComputeVisibility(scene);
  for (auto& v : mask.agent_observed[0]) v = 0;
  EXPECT_THROW(ExtrapolateToPredictionTime(scene, mask, 0), Error);
}

TEST(Forward, ZeroWeightsGiveZeroOutputs) {
  HeadWeights w = HeadWeights::Initialize(feature::kCount, 8, 2, 3, 5);
  ForEachParameterArray(w, [](std::vector<double>& a) { std::fill(a.begin(), a.end(), 0.0); });
  const auto scenes = SmallCorpus(1, 3, 3);
  const PredictionSet p = Forward(w, scenes[0].features);
  for (std::size_t n = 0; n < p.size(); ++n) {
    for (double z : p.class_logits[n]) EXPECT_EQ(z, 0.0);
    EXPECT_EQ(Norm(p.delta[n]), 0.0);
  }
  for (double z : p.mode_logits) EXPECT_EQ(z, 0.0);
}

TEST(Forward, MatchesHandComputedNetwork) {
  HeadWeights w = HeadWeights::Initialize(2, 1, 1, 1, 5);
  // Every head: x -> tanh(a.x + b) -> tanh(c h + d) -> e h + f.
  ForEachParameterArray(w, [](std::vector<double>& a) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.1 * static_cast<double>(i + 1);
  });
  AnchorFeatures feats;
  feats.anchors = {{1.0, 2.0}};
  feats.ego_heading = HeadingVec::FromAngle(std::numbers::pi / 2);
  feats.dim = 2;
  feats.values = {0.5, -1.5};
  const double h1 = std::tanh(0.1 * 0.5 + 0.2 * -1.5 + 0.1);
  const double h2 = std::tanh(0.1 * h1 + 0.1);
  auto out = [&](int k) { return 0.1 * (k + 1) * h2 + 0.1 * (k + 1); };
  const PredictionSet p = Forward(w, feats);
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(p.class_logits[0][c], out(c), 1e-15);
  // Ego-frame (x, y) becomes global (-y, x) under a quarter turn.
  EXPECT_NEAR(p.delta[0].x, -out(1), 1e-15);
  EXPECT_NEAR(p.delta[0].y, out(0), 1e-15);
  EXPECT_NEAR(p.heading_raw[0].x, -out(3), 1e-15);
  EXPECT_NEAR(p.heading_raw[0].y, out(2), 1e-15);
  EXPECT_NEAR(p.mode_logits[0], out(0), 1e-15);
  // Trajectory steps stay in the agent frame.
  EXPECT_NEAR(p.displacements[0].x, out(0), 1e-15);
  EXPECT_NEAR(p.displacements[0].y, out(1), 1e-15);
}

TEST(Forward, BatchEqualsSingleAnchorCalls) {
  const auto scenes = SmallCorpus(1, 4, 5);
  const HeadWeights w = HeadWeights::Initialize(feature::kCount, 16, 3, 5, 9);
  const AnchorFeatures& all = scenes[0].features;
  const PredictionSet batch = Forward(w, all);
  for (std::size_t n = 0; n < all.anchors.size(); n += 7) {
    AnchorFeatures one;
    one.anchors = {all.anchors[n]};
    one.ego_heading = all.ego_heading;
    const auto row = all.Row(n);
    one.values.assign(row.begin(), row.end());
    const PredictionSet single = Forward(w, one);
    EXPECT_EQ(single.class_logits[0], batch.class_logits[n]);
    EXPECT_EQ(single.delta[0], batch.delta[n]);
    EXPECT_EQ(single.Mode(0, 2)[4], batch.Mode(n, 2)[4]);
  }
}

TEST(Forward, RejectsMismatchedFeatureWidth) {
  const HeadWeights w = HeadWeights::Initialize(5, 4, 1, 1, 1);
  AnchorFeatures feats;
  feats.anchors = {{0, 0}};
  feats.values.assign(feature::kCount, 0.0);
  try {
    Forward(w, feats);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

// Central differences of the scene loss on a sample of parameters from
// every head. Targets are recomputed on every evaluation, so a sample that
// crosses a matching or winning-mode boundary would show up as a mismatch.
void CheckSceneGradient(const TrainConfig& config, std::uint64_t seed) {
  const auto scenes = SmallCorpus(3, seed, config.horizon);
  const HeadWeights w = HeadWeights::Initialize(feature::kCount, config.hidden, config.modes,
                                                config.horizon, seed);
  Rng rng(seed);
  for (const PreparedScene& scene : scenes) {
    const SceneGradient sg = ComputeSceneGradient(w, scene, config);
    std::vector<const std::vector<double>*> grads;
    ForEachParameterArray(sg.grad, [&](const std::vector<double>& a) { grads.push_back(&a); });
    HeadWeights work = w;
    std::size_t array_index = 0;
    ForEachParameterArray(work, [&](std::vector<double>& a) {
      const std::vector<double>& g = *grads[array_index++];
      for (int k = 0; k < 6; ++k) {
        const std::size_t i = rng.Index(a.size());
        const double saved = a[i];
        const double h = 1e-5;
        a[i] = saved + h;
        const double up = ComputeSceneGradient(work, scene, config).loss.total;
        a[i] = saved - h;
        const double down = ComputeSceneGradient(work, scene, config).loss.total;
        a[i] = saved;
        const double fd = (up - down) / (2 * h);
        EXPECT_LT(std::abs(g[i] - fd) / std::max({1.0, std::abs(g[i]), std::abs(fd)}), 1e-5)
            << "array " << array_index - 1 << " index " << i;
      }
    });
  }
}

TEST(SceneGradient, HungarianMatchesCentralDifferences) {
  TrainConfig config;
  config.hidden = 8;
  config.modes = 3;
  config.horizon = 5;
  CheckSceneGradient(config, 11);
}

TEST(SceneGradient, ExactCellMatchesCentralDifferences) {
  TrainConfig config;
  config.hidden = 8;
  config.modes = 3;
  config.horizon = 5;
  config.regime = MatchingRegime::kExactWeightedCe;
  CheckSceneGradient(config, 12);
}

TEST(SceneGradient, NoTrajectoryTermLeavesTrajectoryHeadsUntouched) {
  TrainConfig config;
  config.hidden = 8;
  config.modes = 3;
  config.horizon = 5;
  config.loss_weights.traj_weight = 0.0;
  const auto scenes = SmallCorpus(2, 13, 5);
  const HeadWeights w = HeadWeights::Initialize(feature::kCount, 8, 3, 5, 13);
  for (const auto& scene : scenes) {
    const SceneGradient sg = ComputeSceneGradient(w, scene, config);
    for (const auto* head : {&sg.grad.mode_head, &sg.grad.traj_head}) {
      for (const auto& layer : head->layers) {
        for (double v : layer.weight) EXPECT_EQ(v, 0.0);
        for (double v : layer.bias) EXPECT_EQ(v, 0.0);
      }
    }
  }
}

TEST(Adam, ZeroGradientLeavesWeightsUnchanged) {
  HeadWeights w = HeadWeights::Initialize(feature::kCount, 8, 2, 3, 5);
  const HeadWeights before = w;
  HeadWeights zero = w;
  ForEachParameterArray(zero, [](std::vector<double>& a) { std::fill(a.begin(), a.end(), 0.0); });
  AdamOptimizer adam(w, 1e-3);
  for (int i = 0; i < 5; ++i) adam.Step(w, zero);
  EXPECT_TRUE(SameWeights(w, before));
}

TEST(Adam, FirstStepMovesByLearningRateAgainstTheSign) {
  HeadWeights w = HeadWeights::Initialize(feature::kCount, 4, 1, 1, 5);
  const HeadWeights before = w;
  HeadWeights grad = w;
  ForEachParameterArray(grad, [](std::vector<double>& a) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (i % 2 == 0) ? 3.0 : -0.25;
  });
  AdamOptimizer adam(w, 0.01);
  adam.Step(w, grad);
  std::vector<double> moved, was, g;
  ForEachParameterArray(w, [&](const std::vector<double>& a) { moved.insert(moved.end(), a.begin(), a.end()); });
  ForEachParameterArray(before, [&](const std::vector<double>& a) { was.insert(was.end(), a.begin(), a.end()); });
  ForEachParameterArray(grad, [&](const std::vector<double>& a) { g.insert(g.end(), a.begin(), a.end()); });
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(moved[i] - was[i], g[i] > 0 ? -0.01 : 0.01, 1e-8);
  }
}

TEST(Train, ZeroEpochsReturnsInitialization) {
  const auto scenes = SmallCorpus(2, 14, kFutureSteps);
  TrainConfig config;
  config.epochs = 0;
  config.seed = 99;
  const TrainResult r = Train(scenes, config);
  EXPECT_TRUE(r.log.empty());
  EXPECT_TRUE(SameWeights(r.weights, HeadWeights::Initialize(feature::kCount, 64, 6,
                                                             kFutureSteps, 99)));
}

TEST(Train, DeterministicAndDecreasing) {
  const auto scenes = SmallCorpus(16, 15, 10);
  TrainConfig config;
  config.hidden = 16;
  config.modes = 2;
  config.horizon = 10;
  config.epochs = 6;
  config.seed = 3;
  const TrainResult a = Train(scenes, config, scenes);
  const TrainResult b = Train(scenes, config, scenes);
  EXPECT_TRUE(SameWeights(a.weights, b.weights));
  EXPECT_EQ(SerializeTrainLog(a.log), SerializeTrainLog(b.log));
  ASSERT_EQ(a.log.size(), 6u);
  EXPECT_LT(a.log.back().total, a.log.front().total);
  for (const auto& rec : a.log) {
    ASSERT_TRUE(rec.probe_redundancy.has_value());
    EXPECT_NEAR(rec.total, rec.class_loss + rec.pos_loss + rec.traj_loss, 1e-9 * rec.total);
  }
  config.seed = 4;
  EXPECT_FALSE(SameWeights(Train(scenes, config).weights, a.weights));
}

TEST(Train, NoTrajectoryRegimeKeepsTrajectoryHeadsAtInit) {
  const auto scenes = SmallCorpus(8, 16, 10);
  TrainConfig config;
  config.hidden = 16;
  config.modes = 2;
  config.horizon = 10;
  config.epochs = 2;
  config.loss_weights.traj_weight = 0.0;
  const TrainResult r = Train(scenes, config);
  const HeadWeights init = HeadWeights::Initialize(feature::kCount, 16, 2, 10, config.seed);
  for (std::size_t l = 0; l < init.traj_head.layers.size(); ++l) {
    EXPECT_EQ(r.weights.traj_head.layers[l].weight, init.traj_head.layers[l].weight);
    EXPECT_EQ(r.weights.mode_head.layers[l].weight, init.mode_head.layers[l].weight);
    EXPECT_EQ(r.weights.traj_head.layers[l].bias, init.traj_head.layers[l].bias);
  }
  EXPECT_NE(r.weights.class_head.layers[0].weight, init.class_head.layers[0].weight);
}

TEST(TrainConfig, RejectsInvalidValues) {
  const auto scenes = SmallCorpus(1, 17, kFutureSteps);
  for (auto mutate : std::vector<void (*)(TrainConfig&)>{
           [](TrainConfig& c) { c.learning_rate = 0.0; },
           [](TrainConfig& c) { c.batch_size = 0; },
           [](TrainConfig& c) { c.epochs = -1; },
           [](TrainConfig& c) { c.horizon = 41; },
           [](TrainConfig& c) { c.ray_count = 35; },
       }) {
    TrainConfig config;
    mutate(config);
    try {
      Train(scenes, config);
      ADD_FAILURE() << "expected InvalidConfig";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
    }
  }
}

TEST(WeightsIo, RoundTripIsExact) {
  const HeadWeights w = HeadWeights::Initialize(feature::kCount, 8, 3, 4, 21);
  const std::string text = SerializeWeights(w);
  const HeadWeights back = ParseWeights(text);
  EXPECT_EQ(SerializeWeights(back), text);
  EXPECT_EQ(back.class_head.layers[1].weight, w.class_head.layers[1].weight);
  EXPECT_EQ(back.ParameterCount(), w.ParameterCount());
}

TEST(WeightsIo, MalformedDocumentsAreRejected) {
  const HeadWeights w = HeadWeights::Initialize(feature::kCount, 4, 1, 2, 21);
  std::string text = SerializeWeights(w);
  auto code_of = [](const std::string& doc) {
    try {
      ParseWeights(doc);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;  // stands for "no error"
  };
  EXPECT_EQ(code_of("{"), ErrorCode::kParseError);
  EXPECT_EQ(code_of("[]"), ErrorCode::kParseError);
  // Drop one bias entry from the class head.
  auto doc = nlohmann::json::parse(text);
  doc["heads"]["class"][0]["bias"].erase(0);
  EXPECT_EQ(code_of(doc.dump()), ErrorCode::kShapeMismatch);
}

TEST(Predict, DeterministicAndConsistentWithPrepared) {
  const Scene scene = GenerateScene(GeneratorConfig{}, 5);
  const HeadWeights w = HeadWeights::Initialize(feature::kCount, 8, 2, kFutureSteps, 21);
  const ScenePrediction a = Predict(w, scene);
  const ScenePrediction b = PredictPrepared(w, PrepareScene(scene));
  EXPECT_EQ(a.occupancy, b.occupancy);
  ASSERT_EQ(a.occupancy.size(), a.preds.size());
  for (std::size_t n = 0; n < a.preds.size(); ++n) {
    EXPECT_NEAR(a.occupancy[n], OccupancyProbability(a.preds.class_logits[n]), 1e-15);
  }
}

TEST(Redundancy, CountsPositivesPerAgent) {
  const auto scenes = SmallCorpus(3, 22, kFutureSteps);
  HeadWeights w = HeadWeights::Initialize(feature::kCount, 4, 1, kFutureSteps, 1);
  ForEachParameterArray(w, [](std::vector<double>& a) { std::fill(a.begin(), a.end(), 0.0); });
  // Zero network: every anchor has occupancy 3/4.
  std::size_t anchors = 0, agents = 0;
  for (const auto& s : scenes) {
    anchors += s.anchors.size();
    agents += s.gts.size();
  }
  EXPECT_NEAR(RedundancyRatio(w, scenes), double(anchors) / double(agents), 1e-12);
  w.class_head.layers.back().bias[3] = 10.0;
  EXPECT_EQ(RedundancyRatio(w, scenes), 0.0);
}

}  // namespace
}  // namespace occmatch
