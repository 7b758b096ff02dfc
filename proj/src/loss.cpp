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


#include "occmatch/loss.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "occmatch/error.hpp"
#include "occmatch/numerics.hpp"

namespace occmatch {

namespace {

constexpr int kNone = static_cast<int>(AgentClass::kNoClass);

// u = raw / max(|raw|, eps). Exact normalization away from the origin; a
// bounded linear map inside the clip radius.
struct HeadingNormalization {
  Point2 raw;
  double divisor;
  HeadingVec u;

  explicit HeadingNormalization(Point2 r)
      : raw(r), divisor(std::max(Norm(r), kHeadingClipNorm)), u{r.x / divisor, r.y / divisor} {}

  // Pulls a gradient with respect to u back to raw.
  Point2 Backward(Point2 grad_u) const {
    if (Norm(raw) < kHeadingClipNorm) return (1.0 / divisor) * grad_u;
    const double along = grad_u.x * u.c + grad_u.y * u.s;
    return {(grad_u.x - along * u.c) / divisor, (grad_u.y - along * u.s) / divisor};
  }
};

double HalfSquared(Point2 e) { return 0.5 * (e.x * e.x + e.y * e.y); }

// Per-mode mean of per-step MSE, with positions start + R(u) * cumsum(d).
double ModeScore(std::span<const Point2> steps, HeadingVec u, Point2 start,
                 std::span<const Point2> gt) {
  Point2 p = start;
  double sum = 0.0;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    p = p + RotateLocalToGlobal(steps[t], u);
    sum += HalfSquared(p - gt[t]);
  }
  return sum / static_cast<double>(steps.size());
}

int BestMode(std::span<const Point2> modes, int mode_count, HeadingVec u, Point2 start,
             std::span<const Point2> gt, std::vector<double>* scores) {
  const std::size_t horizon = gt.size();
  int best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (int m = 0; m < mode_count; ++m) {
    const double s = ModeScore(modes.subspan(m * horizon, horizon), u, start, gt);
    if (scores) scores->push_back(s);
    if (s < best_score) {
      best_score = s;
      best = m;
    }
  }
  return best;
}

void SoftmaxMinusOneHot(std::span<const double> logits, std::size_t target, double scale,
                        std::span<double> out) {
  const double lse = LogSumExp(logits);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] += scale * (std::exp(logits[i] - lse) - (i == target ? 1.0 : 0.0));
  }
}

}  // namespace

double ClassLoss(const ClassLogits& logits, AgentClass target) {
  return SoftmaxCrossEntropy(logits, static_cast<std::size_t>(target));
}

double PositionalLoss(Point2 anchor, Point2 delta, Point2 heading_raw, Point2 gt_pos,
                      HeadingVec gt_heading) {
  const HeadingVec u = NormalizeHeading(heading_raw.x, heading_raw.y);
  return HalfSquared(anchor + delta - gt_pos) + HeadingCosineGap(u, gt_heading);
}

TrajectoryLossResult TrajectoryLoss(std::span<const Point2> modes, int mode_count,
                                    std::span<const double> mode_logits, HeadingVec heading,
                                    Point2 start, std::span<const Point2> gt_future) {
  if (mode_count < 1 || gt_future.empty() ||
      modes.size() != static_cast<std::size_t>(mode_count) * gt_future.size() ||
      mode_logits.size() != static_cast<std::size_t>(mode_count)) {
    throw Error(ErrorCode::kShapeMismatch, "trajectory loss: inconsistent mode shapes");
  }
  std::vector<double> scores;
  TrajectoryLossResult r;
  r.best_mode = BestMode(modes, mode_count, heading, start, gt_future, &scores);
  r.regression = scores[r.best_mode];
  r.mode_ce = SoftmaxCrossEntropy(mode_logits, r.best_mode);
  r.loss = r.mode_ce + r.regression;
  return r;
}

LossGradients LossGradients::ZerosLike(const PredictionSet& preds) {
  LossGradients g;
  g.class_logits.assign(preds.size(), ClassLogits{});
  g.delta.assign(preds.size(), Point2{});
  g.heading_raw.assign(preds.size(), Point2{});
  g.mode_logits.assign(preds.mode_logits.size(), 0.0);
  g.displacements.assign(preds.displacements.size(), Point2{});
  return g;
}

LossBreakdown EvaluateLoss(const PredictionSet& preds, std::span<const GroundTruth> gts,
                           std::span<const int> targets, const LossWeights& weights,
                           const ClassTermOptions& class_term, LossGradients* grads) {
  const std::size_t n_anchors = preds.size();
  if (targets.size() != n_anchors) {
    throw Error(ErrorCode::kDimensionMismatch, "one target per prediction is required");
  }
  const auto horizon = static_cast<std::size_t>(preds.horizon);
  const int mode_count = preds.modes;

  LossBreakdown out;
  out.anchor_class.assign(n_anchors, 0.0);
  out.anchor_pos.assign(n_anchors, 0.0);
  out.anchor_traj.assign(n_anchors, 0.0);
  out.best_mode.assign(n_anchors, -1);
  if (grads) *grads = LossGradients::ZerosLike(preds);

  for (std::size_t n = 0; n < n_anchors; ++n) {
    const int g = targets[n];
    if (g != kNoObject && (g < 0 || static_cast<std::size_t>(g) >= gts.size())) {
      throw Error(ErrorCode::kDimensionMismatch, "target index out of range");
    }
    const ClassLogits& z = preds.class_logits[n];

    // Class term.
    if (class_term.kind == ClassTermOptions::Kind::kCategorical) {
      const int cls = g == kNoObject ? kNone : static_cast<int>(gts[g].cls);
      out.anchor_class[n] = SoftmaxCrossEntropy(z, cls);
      if (grads && weights.class_weight != 0.0) {
        SoftmaxMinusOneHot(z, cls, weights.class_weight, grads->class_logits[n]);
      }
    } else {
      const double lse = LogSumExp(z);
      if (g == kNoObject) {
        out.anchor_class[n] = lse - z[kNone];
        if (grads && weights.class_weight != 0.0) {
          SoftmaxMinusOneHot(z, kNone, weights.class_weight, grads->class_logits[n]);
        }
      } else {
        // -w log(1 - P(none)) = w (lse(z) - lse(z without none)).
        const std::array<double, kNumClasses - 1> agent_logits{z[0], z[1], z[2]};
        const double lse_agents = LogSumExp(agent_logits);
        const double w = class_term.positive_weight;
        out.anchor_class[n] = w * (lse - lse_agents);
        if (grads && weights.class_weight != 0.0) {
          auto& gz = grads->class_logits[n];
          for (int j = 0; j < kNumClasses; ++j) {
            const double within = j == kNone ? 0.0 : std::exp(z[j] - lse_agents);
            gz[j] += weights.class_weight * w * (std::exp(z[j] - lse) - within);
          }
        }
      }
    }
    if (g == kNoObject) continue;
    const GroundTruth& gt = gts[g];

    const HeadingNormalization heading(preds.heading_raw[n]);
    const Point2 start = preds.Position(n);
    Point2 grad_start{};
    Point2 grad_u{};

    // Positional term.
    const Point2 pos_err = start - gt.position;
    out.anchor_pos[n] = HalfSquared(pos_err) + HeadingCosineGap(heading.u, gt.heading);
    if (grads && weights.pos_weight != 0.0) {
      grad_start = grad_start + weights.pos_weight * pos_err;
      grad_u = grad_u + (-weights.pos_weight) * Point2{gt.heading.c, gt.heading.s};
    }

    // Trajectory term. The best mode is picked by value and then held fixed.
    if (gt.future.size() != horizon) {
      throw Error(ErrorCode::kShapeMismatch, "ground-truth future length differs from horizon");
    }
    const std::span<const Point2> all_modes(
        preds.displacements.data() + n * mode_count * horizon, mode_count * horizon);
    const auto traj = TrajectoryLoss(all_modes, mode_count, preds.ModeLogits(n), heading.u,
                                     start, gt.future);
    out.anchor_traj[n] = traj.loss;
    out.best_mode[n] = traj.best_mode;

    if (grads && weights.traj_weight != 0.0) {
      const double w3 = weights.traj_weight;
      std::span<double> g_logits(grads->mode_logits.data() + n * mode_count, mode_count);
      SoftmaxMinusOneHot(preds.ModeLogits(n), traj.best_mode, w3, g_logits);

      const auto steps = preds.Mode(n, traj.best_mode);
      const HeadingVec u = heading.u;
      // Forward pass again to collect per-step residuals.
      std::vector<Point2> residual(horizon);
      Point2 cumulative{};
      for (std::size_t t = 0; t < horizon; ++t) {
        cumulative = cumulative + steps[t];
        const Point2 p = start + RotateLocalToGlobal(cumulative, u);
        residual[t] = (w3 / static_cast<double>(horizon)) * (p - gt.future[t]);
        grad_start = grad_start + residual[t];
        // d p / d(c, s) applied to the residual.
        grad_u.x += residual[t].x * cumulative.x + residual[t].y * cumulative.y;
        grad_u.y += -residual[t].x * cumulative.y + residual[t].y * cumulative.x;
      }
      // Step k moves every position at t >= k.
      Point2* g_steps = grads->displacements.data() + (n * mode_count + traj.best_mode) * horizon;
      Point2 tail{};
      for (std::size_t t = horizon; t-- > 0;) {
        tail = tail + residual[t];
        g_steps[t] = RotateGlobalToLocal(tail, u);
      }
    }

    if (grads) {
      grads->delta[n] = grad_start;
      grads->heading_raw[n] = heading.Backward(grad_u);
    }
  }

  for (std::size_t n = 0; n < n_anchors; ++n) {
    out.class_loss += out.anchor_class[n];
    out.pos_loss += out.anchor_pos[n];
    out.traj_loss += out.anchor_traj[n];
  }
  out.total = weights.class_weight * out.class_loss + weights.pos_weight * out.pos_loss +
              weights.traj_weight * out.traj_loss;
  return out;
}

LossBreakdown TotalLoss(const PredictionSet& preds, std::span<const GroundTruth> gts,
                        const Assignment& sigma, const LossWeights& weights) {
  return EvaluateLoss(preds, gts, sigma.sigma, weights, {}, nullptr);
}

LossGradients TotalLossGradients(const PredictionSet& preds, std::span<const GroundTruth> gts,
                                 const Assignment& sigma, const LossWeights& weights) {
  LossGradients grads;
  EvaluateLoss(preds, gts, sigma.sigma, weights, {}, &grads);
  return grads;
}

std::vector<int> ExactCellTargets(const PredictionSet& preds, std::span<const GroundTruth> gts,
                                  const Grid& grid) {
  std::vector<int> gt_cell(gts.size(), -1);
  for (std::size_t g = 0; g < gts.size(); ++g) {
    gt_cell[g] = grid.CellOf(gts[g].position).value_or(-1);
  }
  std::vector<int> targets(preds.size(), kNoObject);
  for (std::size_t n = 0; n < preds.size(); ++n) {
    const auto cell = grid.CellOf(preds.anchors[n]);
    if (!cell) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_cell[g] != *cell) continue;
      const double d = Distance(preds.anchors[n], gts[g].position);
      if (d < best) {
        best = d;
        targets[n] = static_cast<int>(g);
      }
    }
  }
  return targets;
}

double ExactMatchWeightedCe(const PredictionSet& preds, std::span<const GroundTruth> gts,
                            const Grid& grid, double positive_weight) {
  if (!(positive_weight > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "positive_weight must be > 0");
  }
  const auto targets = ExactCellTargets(preds, gts, grid);
  const LossWeights class_only{1.0, 0.0, 0.0};
  ClassTermOptions term;
  term.kind = ClassTermOptions::Kind::kWeightedOccupancy;
  term.positive_weight = positive_weight;
  return EvaluateLoss(preds, gts, targets, class_only, term, nullptr).class_loss;
}

// ---------------------------------------------------------------------------
// Case study.

namespace {

ClassLogits LogitsForOccupancy(double p) {
  return {std::log(p), -30.0, -30.0, std::log(1.0 - p)};
}

LossCase EvaluateCase(const std::string& name, const std::vector<double>& occupancy) {
  constexpr int kSide = 5;
  constexpr double kHigh = kGridResolution * kSide / 2.0;
  const Grid grid = Grid::ForRegion({-kHigh, -kHigh, kHigh, kHigh});

  // One car at the patch centre driving +x at 5 m/s; a single exact mode.
  GroundTruth car;
  car.cls = AgentClass::kCar;
  car.position = {0.0, 0.0};
  car.heading = {1.0, 0.0};
  for (int t = 1; t <= kFutureSteps; ++t) car.future.push_back({0.5 * t, 0.0});
  const std::vector<GroundTruth> gts{car};

  std::vector<Point2> anchors;
  for (int cell = 0; cell < grid.CellCount(); ++cell) anchors.push_back(grid.CellCenter(cell));
  PredictionSet preds = PredictionSet::Zeros(anchors, 1, kFutureSteps);
  for (std::size_t n = 0; n < anchors.size(); ++n) {
    preds.class_logits[n] = LogitsForOccupancy(occupancy[n]);
    preds.heading_raw[n] = {1.0, 0.0};
    for (auto& step : preds.Mode(n, 0)) step = {0.5, 0.0};
  }

  const Assignment sigma = Match(preds, gts);
  const auto exact = ExactCellTargets(preds, gts, grid);

  ClassTermOptions weighted;
  weighted.kind = ClassTermOptions::Kind::kWeightedOccupancy;
  const LossBreakdown with =
      EvaluateLoss(preds, gts, sigma.sigma, {1.0, 1.0, 0.0}, weighted, nullptr);
  const LossBreakdown without = EvaluateLoss(preds, gts, exact, {1.0, 0.0, 0.0}, weighted, nullptr);
  const LossBreakdown matched = TotalLoss(preds, gts, sigma);

  LossCase c;
  c.name = name;
  c.with_matching = with.total;
  c.without_matching = without.total;
  c.positional_term = with.pos_loss;
  c.matched_loss = matched.total;
  c.matched_anchor = sigma.PredictionForGroundTruth(1)[0];
  for (std::size_t n = 0; n < anchors.size(); ++n) {
    c.anchors.push_back({anchors[n], occupancy[n], sigma.sigma[n] != kNoObject,
                         exact[n] != kNoObject, with.anchor_class[n] + with.anchor_pos[n],
                         without.anchor_class[n],
                         matched.anchor_class[n] + matched.anchor_pos[n] + matched.anchor_traj[n]});
  }
  return c;
}

}  // namespace

LossCaseReport RunLossCaseStudy() {
  constexpr double kHighP = 0.95;
  constexpr double kLowP = 0.02;
  constexpr int kCenter = 12;  // (2, 2) on the 5 x 5 patch
  constexpr int kEast = 13;
  std::vector<double> exact(25, kLowP);
  exact[kCenter] = kHighP;
  std::vector<double> offset(25, kLowP);
  offset[kEast] = kHighP;
  std::vector<double> redundant(25, kLowP);
  for (int n : {kCenter, kCenter - 1, kCenter + 1, kCenter - 5, kCenter + 5}) redundant[n] = kHighP;

  LossCaseReport report;
  report.cases.push_back(EvaluateCase("a_exact", exact));
  report.cases.push_back(EvaluateCase("b_offset", offset));
  report.cases.push_back(EvaluateCase("c_redundant", redundant));

  const auto& a = report.cases[0];
  const auto& b = report.cases[1];
  const auto& c = report.cases[2];
  constexpr double kTol = 1e-9;
  report.ordering_holds =
      b.without_matching > b.with_matching && b.without_matching > a.without_matching &&
      std::abs(a.with_matching - a.without_matching) <= a.positional_term + kTol &&
      std::abs(c.with_matching - c.without_matching) <= c.positional_term + kTol &&
      std::abs(b.with_matching - (a.with_matching + b.positional_term)) <= kTol;
  return report;
}

std::string LossCaseReport::ToText() const {
  std::ostringstream os;
  char buf[256];
  os << "case,with_matching,without_matching,positional_term,matched_loss,matched_anchor\n";
  for (const auto& c : cases) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%d\n", c.name.c_str(),
                  c.with_matching, c.without_matching, c.positional_term, c.matched_loss,
                  c.matched_anchor);
    os << buf;
  }
  os << "\ncase,anchor,x,y,occupancy,matched_target,exact_target,with_matching,"
        "without_matching,matched_loss_term\n";
  for (const auto& c : cases) {
    for (std::size_t n = 0; n < c.anchors.size(); ++n) {
      const auto& a = c.anchors[n];
      std::snprintf(buf, sizeof(buf), "%s,%zu,%.2f,%.2f,%.2f,%d,%d,%.6f,%.6f,%.6f\n",
                    c.name.c_str(), n, a.position.x, a.position.y, a.occupancy,
                    a.matched_target ? 1 : 0, a.exact_target ? 1 : 0, a.with_matching,
                    a.without_matching, a.matched_loss_term);
      os << buf;
    }
  }
  os << "\nordering_holds," << (ordering_holds ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace occmatch
