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


#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "occmatch/assign.hpp"
#include "occmatch/demo.hpp"
#include "occmatch/error.hpp"
#include "occmatch/rng.hpp"

namespace occmatch {
namespace {

bool ErrorIs(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

// Logits whose softmax puts probability p on cls and spreads the rest.
ClassLogits LogitsWith(AgentClass cls, double p) {
  ClassLogits z{};
  for (int c = 0; c < kNumClasses; ++c) {
    z[c] = c == static_cast<int>(cls) ? std::log(p) : std::log((1.0 - p) / 3.0);
  }
  return z;
}

GroundTruth Gt(Point2 p, AgentClass cls = AgentClass::kCar) {
  GroundTruth g;
  g.cls = cls;
  g.position = p;
  g.future.assign(1, p);
  return g;
}

CostMatrix RandomMatrix(Rng& rng, int rows, int cols, bool integer) {
  CostMatrix m;
  m.rows = rows;
  m.cols = cols;
  for (int i = 0; i < rows * cols; ++i) {
    m.entries.push_back(integer ? static_cast<double>(rng.Index(21)) - 10.0
                                : rng.Uniform(-10.0, 10.0));
  }
  return m;
}

// Exhaustive minimum over injective maps rows -> cols.
double BruteForce(const CostMatrix& m) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> used(m.cols, 0);
  std::function<void(int, double)> rec = [&](int r, double acc) {
    if (r == m.rows) {
      best = std::min(best, acc);
      return;
    }
    for (int c = 0; c < m.cols; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      rec(r + 1, acc + m(r, c));
      used[c] = 0;
    }
  };
  rec(0, 0.0);
  return best;
}

void ExpectValidAssignment(const CostMatrix& m, const Assignment& a) {
  ASSERT_EQ(a.sigma.size(), static_cast<std::size_t>(m.cols));
  std::vector<int> seen(m.rows, 0);
  double sum = 0.0;
  for (int n = 0; n < m.cols; ++n) {
    if (a.sigma[n] == kNoObject) continue;
    ASSERT_GE(a.sigma[n], 0);
    ASSERT_LT(a.sigma[n], m.rows);
    ++seen[a.sigma[n]];
    sum += m(a.sigma[n], n);
  }
  for (int g = 0; g < m.rows; ++g) EXPECT_EQ(seen[g], 1);
  EXPECT_NEAR(sum, a.total_cost, 1e-9);
}

TEST(BuildCostMatrix, Examples) {
  PredictionSet preds = PredictionSet::Zeros({{0, 0}}, 1, 1);
  preds.class_logits[0] = {50.0, 0.0, 0.0, 0.0};
  const std::vector<GroundTruth> gts = {Gt({0, 0})};
  EXPECT_NEAR(BuildCostMatrix(preds, gts, 1.0, 1.0)(0, 0), -1.0, 1e-12);

  PredictionSet far = PredictionSet::Zeros({{2, 0}}, 1, 1);
  far.class_logits[0] = {-800.0, 0.0, 0.0, 0.0};
  EXPECT_NEAR(BuildCostMatrix(far, gts, 1.0, 1.0)(0, 0), 2.0, 1e-12);

  // Delta shifts the predicted position.
  PredictionSet shifted = PredictionSet::Zeros({{5, 5}}, 1, 1);
  shifted.delta[0] = {-2, -5};
  shifted.class_logits[0] = {-800.0, 0.0, 0.0, 0.0};
  EXPECT_NEAR(BuildCostMatrix(shifted, gts, 1.0, 1.0)(0, 0), 3.0, 1e-12);
}

TEST(BuildCostMatrix, TwoCandidateFlip) {
  const PredictionSet preds = CostFlipPredictions();
  const auto gts = CostFlipGroundTruth();
  const CostMatrix low = BuildCostMatrix(preds, gts, 1.0, 1.0);
  EXPECT_NEAR(low(0, 0), -0.2, 1e-12);
  EXPECT_NEAR(low(0, 1), 0.6, 1e-12);
  EXPECT_EQ(Match(preds, gts, 1.0, 1.0).sigma, (std::vector<int>{0, kNoObject}));
  const CostMatrix high = BuildCostMatrix(preds, gts, 1.0, 3.0);
  EXPECT_NEAR(high(0, 0), -0.6, 1e-12);
  EXPECT_NEAR(high(0, 1), -1.2, 1e-12);
  EXPECT_EQ(Match(preds, gts, 1.0, 3.0).sigma, (std::vector<int>{kNoObject, 0}));
}

TEST(BuildCostMatrix, Errors) {
  const PredictionSet one = PredictionSet::Zeros({{0, 0}}, 1, 1);
  const std::vector<GroundTruth> two = {Gt({0, 0}), Gt({1, 1})};
  EXPECT_TRUE(ErrorIs(ErrorCode::kDimensionMismatch, [&] { BuildCostMatrix(one, two); }));
  EXPECT_TRUE(ErrorIs(ErrorCode::kInvalidConfig, [&] {
    BuildCostMatrix(one, std::vector<GroundTruth>{Gt({0, 0})}, -1.0, 1.0);
  }));
  EXPECT_TRUE(ErrorIs(ErrorCode::kDimensionMismatch, [] { CostMatrix::FromRows({{1, 2}, {3}}); }));
  EXPECT_TRUE(ErrorIs(ErrorCode::kDimensionMismatch,
                      [] { CostMatrix::FromRows({{1, std::nan("")}}); }));
  EXPECT_TRUE(ErrorIs(ErrorCode::kDimensionMismatch,
                      [] { HungarianSolve(CostMatrix::FromRows({{1}, {2}})); }));
}

TEST(HungarianSolve, SmallExamples) {
  const Assignment one = HungarianSolve(CostMatrix::FromRows({{5}}));
  EXPECT_EQ(one.sigma, std::vector<int>{0});
  EXPECT_EQ(one.total_cost, 5.0);

  const Assignment diag = HungarianSolve(CostMatrix::FromRows({{1, 2}, {2, 1}}));
  EXPECT_EQ(diag.sigma, (std::vector<int>{0, 1}));
  EXPECT_EQ(diag.total_cost, 2.0);

  const Assignment wide = HungarianSolve(CostMatrix::FromRows({{5, 1, 7}}));
  EXPECT_EQ(wide.sigma, (std::vector<int>{kNoObject, 0, kNoObject}));
  EXPECT_EQ(wide.total_cost, 1.0);

  CostMatrix empty;
  empty.cols = 4;
  const Assignment none = HungarianSolve(empty);
  EXPECT_EQ(none.sigma, std::vector<int>(4, kNoObject));
  EXPECT_EQ(none.total_cost, 0.0);
}

TEST(HungarianSolve, TiesGoToLowerPredictionIndex) {
  EXPECT_EQ(HungarianSolve(CostMatrix::FromRows({{3, 3, 3}})).sigma,
            (std::vector<int>{0, kNoObject, kNoObject}));
  EXPECT_EQ(HungarianSolve(CostMatrix::FromRows({{2, 1, 1}})).sigma,
            (std::vector<int>{kNoObject, 0, kNoObject}));
}

TEST(HungarianSolve, MatchesBruteForceOnIntegerCosts) {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const int cols = 1 + static_cast<int>(rng.Index(8));
    const int rows = static_cast<int>(rng.Index(std::min(cols, 6) + 1));
    const CostMatrix m = RandomMatrix(rng, rows, cols, true);
    const Assignment a = HungarianSolve(m);
    ExpectValidAssignment(m, a);
    EXPECT_EQ(a.total_cost, rows == 0 ? 0.0 : BruteForce(m)) << "instance " << i;
  }
}

TEST(HungarianSolve, MatchesBruteForceOnRealCosts) {
  Rng rng(22);
  for (int i = 0; i < 1000; ++i) {
    const int cols = 1 + static_cast<int>(rng.Index(8));
    const int rows = static_cast<int>(rng.Index(std::min(cols, 6) + 1));
    const CostMatrix m = RandomMatrix(rng, rows, cols, false);
    const Assignment a = HungarianSolve(m);
    ExpectValidAssignment(m, a);
    EXPECT_NEAR(a.total_cost, rows == 0 ? 0.0 : BruteForce(m), 1e-9) << "instance " << i;
  }
}

TEST(HungarianSolve, NeverBeatenByRandomInjectiveMaps) {
  Rng rng(23);
  for (int i = 0; i < 10; ++i) {
    const CostMatrix m = RandomMatrix(rng, 12, 40, false);
    const double best = HungarianSolve(m).total_cost;
    std::vector<int> cols(m.cols);
    for (int trial = 0; trial < 10000; ++trial) {
      std::iota(cols.begin(), cols.end(), 0);
      for (int k = 0; k < m.rows; ++k) {
        std::swap(cols[k], cols[k + rng.Index(m.cols - k)]);
      }
      double cost = 0.0;
      for (int g = 0; g < m.rows; ++g) cost += m(g, cols[g]);
      ASSERT_LE(best, cost + 1e-9);
    }
  }
}

TEST(HungarianSolve, PermutingPredictionsPermutesSigma) {
  Rng rng(24);
  for (int i = 0; i < 200; ++i) {
    const CostMatrix m = RandomMatrix(rng, 4, 7, false);
    std::vector<int> perm(m.cols);
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = m.cols - 1; k > 0; --k) std::swap(perm[k], perm[rng.Index(k + 1)]);
    CostMatrix p = m;
    for (int g = 0; g < m.rows; ++g) {
      for (int n = 0; n < m.cols; ++n) p(g, n) = m(g, perm[n]);
    }
    const Assignment a = HungarianSolve(m);
    const Assignment b = HungarianSolve(p);
    EXPECT_NEAR(a.total_cost, b.total_cost, 1e-9);
    for (int n = 0; n < m.cols; ++n) EXPECT_EQ(b.sigma[n], a.sigma[perm[n]]);
  }
}

TEST(HungarianSolve, ConstantShiftAndScale) {
  Rng rng(25);
  for (int i = 0; i < 200; ++i) {
    const CostMatrix m = RandomMatrix(rng, 5, 8, false);
    const double k = rng.Uniform(-20, 20);
    CostMatrix shifted = m;
    for (double& e : shifted.entries) e += k;
    const Assignment a = HungarianSolve(m);
    const Assignment b = HungarianSolve(shifted);
    EXPECT_EQ(a.sigma, b.sigma);
    EXPECT_NEAR(b.total_cost, a.total_cost + k * m.rows, 1e-9);
  }
}

TEST(Match, ScalingBothLambdasKeepsAssignment) {
  Rng rng(26);
  for (int i = 0; i < 100; ++i) {
    PredictionSet preds = PredictionSet::Zeros({}, 1, 1);
    std::vector<Point2> anchors;
    for (int n = 0; n < 8; ++n) anchors.push_back({rng.Uniform(-10, 10), rng.Uniform(-10, 10)});
    preds = PredictionSet::Zeros(anchors, 1, 1);
    for (int n = 0; n < 8; ++n) {
      for (double& z : preds.class_logits[n]) z = rng.Uniform(-3, 3);
    }
    std::vector<GroundTruth> gts;
    for (int g = 0; g < 3; ++g) {
      gts.push_back(Gt({rng.Uniform(-10, 10), rng.Uniform(-10, 10)},
                       static_cast<AgentClass>(rng.Index(3))));
    }
    const double s = rng.Uniform(0.1, 10);
    const Assignment a = Match(preds, gts, 1.0, 3.0);
    const Assignment b = Match(preds, gts, s, 3.0 * s);
    EXPECT_EQ(a.sigma, b.sigma);
    EXPECT_NEAR(b.total_cost, s * a.total_cost, 1e-9 * (1 + std::abs(b.total_cost)));
  }
}

TEST(Match, EmptyGroundTruthAndDominantDiagonal) {
  const PredictionSet five = PredictionSet::Zeros({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}, 1, 1);
  const Assignment none = Match(five, std::vector<GroundTruth>{});
  EXPECT_EQ(none.sigma, std::vector<int>(5, kNoObject));
  EXPECT_EQ(none.total_cost, 0.0);

  PredictionSet preds = PredictionSet::Zeros({{0, 0}, {10, 0}, {0, 10}}, 1, 1);
  const AgentClass classes[] = {AgentClass::kCar, AgentClass::kPedestrian, AgentClass::kBicycle};
  std::vector<GroundTruth> gts;
  for (int i = 0; i < 3; ++i) {
    preds.class_logits[i] = LogitsWith(classes[i], 0.99);
    gts.push_back(Gt(preds.anchors[i], classes[i]));
  }
  // Ground truths listed in a different order than the predictions.
  std::swap(gts[0], gts[2]);
  const Assignment a = Match(preds, gts);
  EXPECT_EQ(a.sigma, (std::vector<int>{2, 1, 0}));
}

}  // namespace
}  // namespace occmatch
