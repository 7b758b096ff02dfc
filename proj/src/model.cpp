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


#include "occmatch/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "occmatch/error.hpp"
#include "occmatch/rng.hpp"

namespace occmatch {

// ---------------------------------------------------------------------------
// Features

namespace {

struct Track {
  bool observed_now = false;
  Point2 last_position;
  HeadingVec last_heading;
  Point2 velocity;
  double yaw_rate = 0.0;
  double since_observed = 0.0;
  Point2 extrapolated;
};

double WrapAngle(double a) {
  return std::remainder(a, 2.0 * std::numbers::pi);
}

std::optional<Track> BuildTrack(const Scene& scene, const VisibilityMask& mask, int agent_index) {
  const auto last = mask.LastObservedStep(agent_index);
  if (!last) return std::nullopt;
  const auto& states = scene.agents[agent_index].states;
  Track t;
  t.observed_now = *last == kPredictionStep;
  t.last_position = states[*last].position;
  t.last_heading = states[*last].heading;
  for (int prev = *last - 1; prev >= 0; --prev) {
    if (!mask.AgentObserved(agent_index, prev)) continue;
    const double dt = (*last - prev) * kStepSeconds;
    t.velocity = (1.0 / dt) * (states[*last].position - states[prev].position);
    t.yaw_rate = WrapAngle(states[*last].heading.Angle() - states[prev].heading.Angle()) / dt;
    break;
  }
  t.since_observed = (kPredictionStep - *last) * kStepSeconds;
  t.extrapolated = t.last_position + t.since_observed * t.velocity;
  return t;
}

}  // namespace

Point2 ExtrapolateToPredictionTime(const Scene& scene, const VisibilityMask& mask,
                                   int agent_index) {
  const auto track = BuildTrack(scene, mask, agent_index);
  if (!track) {
    throw Error(ErrorCode::kInvalidConfig,
                "agent " + std::to_string(agent_index) + " was never observed");
  }
  return track->extrapolated;
}

AnchorFeatures ExtractFeatures(const Scene& scene, const VisibilityMask& mask,
                               const AnchorSet& anchors) {
  namespace f = feature;
  const Grid& grid = mask.grid;
  const HeadingVec ego = scene.ego_heading;
  auto to_ego = [&](Point2 v) { return RotateGlobalToLocal(v, ego); };

  std::vector<std::optional<Track>> tracks;
  for (std::size_t i = 0; i < scene.agents.size(); ++i) {
    tracks.push_back(BuildTrack(scene, mask, static_cast<int>(i)));
  }

  AnchorFeatures out;
  out.ego_heading = ego;
  out.dim = f::kCount;
  out.values.assign(anchors.size() * f::kCount, 0.0);

  const auto& visible_now = mask.cell_visible[kPredictionStep];
  for (std::size_t n = 0; n < anchors.size(); ++n) {
    const Anchor& anchor = anchors.anchors[n];
    out.anchors.push_back(anchor.position);
    double* row = out.values.data() + n * f::kCount;

    const Point2 rel = to_ego(anchor.position - scene.ego_position);
    row[f::kEgoX] = rel.x / 30.0;
    row[f::kEgoY] = rel.y / 30.0;
    row[f::kOccluded] = (anchor.cell < 0 || !visible_now[anchor.cell]) ? 1.0 : 0.0;
    const bool from_agent = anchor.source == AnchorSource::kObservedAgent;
    row[f::kFromAgent] = from_agent ? 1.0 : 0.0;
    const bool fresh = from_agent && tracks[anchor.agent_index]->observed_now;
    row[f::kFresh] = fresh ? 1.0 : 0.0;

    int subject = -1;
    Point2 subject_point;
    if (fresh) {
      subject = anchor.agent_index;
      subject_point = tracks[subject]->last_position;
    } else {
      double best = kSubjectDistanceCap;
      for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (!tracks[i] || tracks[i]->observed_now) continue;
        const double d = Distance(tracks[i]->extrapolated, anchor.position);
        if (d <= best) {
          best = d;
          subject = static_cast<int>(i);
          subject_point = tracks[i]->extrapolated;
        }
      }
    }

    if (subject >= 0) {
      const Track& t = *tracks[subject];
      row[f::kSubjectClass + static_cast<int>(scene.agents[subject].cls)] = 1.0;
      const HeadingVec h = Compose(ego.Inverse(), t.last_heading);
      row[f::kSubjectHeading] = h.c;
      row[f::kSubjectHeading + 1] = h.s;
      row[f::kSubjectSpeed] = Norm(t.velocity) / 10.0;
      row[f::kSubjectYawRate] = t.yaw_rate;
      const Point2 offset = to_ego(subject_point - anchor.position);
      row[f::kSubjectOffset] = offset.x / kSubjectDistanceCap;
      row[f::kSubjectOffset + 1] = offset.y / kSubjectDistanceCap;
      row[f::kSubjectDistance] = Norm(offset) / kSubjectDistanceCap;
      row[f::kSinceObserved] = t.since_observed;
      row[f::kSubjectInCell] =
          (anchor.cell >= 0 && grid.CellOf(subject_point) == anchor.cell) ? 1.0 : 0.0;
    } else {
      row[f::kSubjectDistance] = 1.0;
    }

    if (anchor.cell >= 0) {
      const int ix = anchor.cell % grid.nx;
      const int iy = anchor.cell / grid.nx;
      int total = 0;
      int occluded = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int jx = ix + dx;
          const int jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= grid.nx || jy >= grid.ny) continue;
          ++total;
          if (!visible_now[grid.Index(jx, jy)]) ++occluded;
        }
      }
      row[f::kOccludedDensity] = static_cast<double>(occluded) / total;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Heads

namespace {

Mlp MakeMlp(const std::vector<int>& dims, Rng& rng) {
  Mlp mlp;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    DenseLayer layer;
    layer.in = dims[k];
    layer.out = dims[k + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    layer.weight.resize(static_cast<std::size_t>(layer.in) * layer.out);
    for (double& w : layer.weight) w = rng.Uniform(-bound, bound);
    layer.bias.assign(layer.out, 0.0);
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

// acts[0] is the input, acts[k + 1] the output of layer k.
struct MlpTrace {
  std::vector<std::vector<double>> acts;
};

void MlpForward(const Mlp& mlp, std::span<const double> x, MlpTrace& trace) {
  trace.acts.resize(mlp.layers.size() + 1);
  trace.acts[0].assign(x.begin(), x.end());
  for (std::size_t k = 0; k < mlp.layers.size(); ++k) {
    const DenseLayer& layer = mlp.layers[k];
    const std::vector<double>& in = trace.acts[k];
    std::vector<double>& out = trace.acts[k + 1];
    out.resize(layer.out);
    const bool hidden = k + 1 < mlp.layers.size();
    for (int o = 0; o < layer.out; ++o) {
      const double* w = layer.weight.data() + static_cast<std::size_t>(o) * layer.in;
      double acc = layer.bias[o];
      for (int i = 0; i < layer.in; ++i) acc += w[i] * in[i];
      out[o] = hidden ? std::tanh(acc) : acc;
    }
  }
}

void MlpBackward(const Mlp& mlp, const MlpTrace& trace, std::span<const double> grad_out,
                 Mlp& grad) {
  std::vector<double> g(grad_out.begin(), grad_out.end());
  std::vector<double> g_in;
  for (std::size_t k = mlp.layers.size(); k-- > 0;) {
    const DenseLayer& layer = mlp.layers[k];
    DenseLayer& glayer = grad.layers[k];
    const std::vector<double>& in = trace.acts[k];
    if (k + 1 < mlp.layers.size()) {
      const std::vector<double>& act = trace.acts[k + 1];
      for (int o = 0; o < layer.out; ++o) g[o] *= 1.0 - act[o] * act[o];
    }
    for (int o = 0; o < layer.out; ++o) {
      if (g[o] == 0.0) continue;
      glayer.bias[o] += g[o];
      double* gw = glayer.weight.data() + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) gw[i] += g[o] * in[i];
    }
    if (k == 0) break;
    g_in.assign(layer.in, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      if (g[o] == 0.0) continue;
      const double* w = layer.weight.data() + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) g_in[i] += w[i] * g[o];
    }
    g.swap(g_in);
  }
}

void CheckMlp(const Mlp& mlp, int in, int out, const char* name) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kShapeMismatch, std::string(name) + " head: " + what);
  };
  if (mlp.layers.empty()) fail("no layers");
  if (mlp.InputDim() != in) fail("input width " + std::to_string(mlp.InputDim()) +
                                 ", expected " + std::to_string(in));
  if (mlp.OutputDim() != out) fail("output width " + std::to_string(mlp.OutputDim()) +
                                   ", expected " + std::to_string(out));
  for (std::size_t k = 0; k < mlp.layers.size(); ++k) {
    const auto& l = mlp.layers[k];
    if (k > 0 && l.in != mlp.layers[k - 1].out) fail("layer widths do not chain");
    if (l.weight.size() != static_cast<std::size_t>(l.in) * l.out ||
        l.bias.size() != static_cast<std::size_t>(l.out)) {
      fail("layer " + std::to_string(k) + " has inconsistent arrays");
    }
    for (double v : l.weight) if (!std::isfinite(v)) fail("non-finite weight");
    for (double v : l.bias) if (!std::isfinite(v)) fail("non-finite bias");
  }
}

HeadWeights ZerosLike(const HeadWeights& w) {
  HeadWeights z = w;
  ForEachParameterArray(z, [](std::vector<double>& a) { std::fill(a.begin(), a.end(), 0.0); });
  return z;
}

// Writes the raw head outputs of anchor n into preds (global frame).
void ScatterClass(const std::vector<double>& out, PredictionSet& preds, std::size_t n) {
  for (int c = 0; c < kNumClasses; ++c) preds.class_logits[n][c] = out[c];
}

void ScatterPos(const std::vector<double>& out, HeadingVec ego, PredictionSet& preds,
                std::size_t n) {
  preds.delta[n] = RotateLocalToGlobal({out[0], out[1]}, ego);
  preds.heading_raw[n] = RotateLocalToGlobal({out[2], out[3]}, ego);
}

void ScatterModes(const std::vector<double>& out, PredictionSet& preds, std::size_t n) {
  auto logits = preds.ModeLogits(n);
  std::copy(out.begin(), out.end(), logits.begin());
}

void ScatterTraj(const std::vector<double>& out, PredictionSet& preds, std::size_t n) {
  Point2* dst = preds.displacements.data() + n * preds.modes * preds.horizon;
  const std::size_t count = static_cast<std::size_t>(preds.modes) * preds.horizon;
  for (std::size_t i = 0; i < count; ++i) dst[i] = {out[2 * i], out[2 * i + 1]};
}

}  // namespace

HeadWeights HeadWeights::Initialize(int feature_dim, int hidden, int modes, int horizon,
                                    std::uint64_t seed) {
  if (feature_dim < 1 || hidden < 1 || modes < 1 || horizon < 1) {
    throw Error(ErrorCode::kInvalidConfig, "head dimensions must be positive");
  }
  Rng rng(Rng::Derive(seed, 0));
  HeadWeights w;
  w.feature_dim = feature_dim;
  w.hidden = hidden;
  w.modes = modes;
  w.horizon = horizon;
  w.class_head = MakeMlp({feature_dim, hidden, hidden, kNumClasses}, rng);
  w.pos_head = MakeMlp({feature_dim, hidden, hidden, 4}, rng);
  w.mode_head = MakeMlp({feature_dim, hidden, hidden, modes}, rng);
  w.traj_head = MakeMlp({feature_dim, hidden, hidden, modes * horizon * 2}, rng);
  return w;
}

void HeadWeights::Validate() const {
  if (modes < 1 || horizon < 1) throw Error(ErrorCode::kShapeMismatch, "modes/horizon must be >= 1");
  CheckMlp(class_head, feature_dim, kNumClasses, "class");
  CheckMlp(pos_head, feature_dim, 4, "position");
  CheckMlp(mode_head, feature_dim, modes, "mode");
  CheckMlp(traj_head, feature_dim, modes * horizon * 2, "trajectory");
}

std::size_t HeadWeights::ParameterCount() const {
  std::size_t count = 0;
  ForEachParameterArray(*this, [&](const std::vector<double>& a) { count += a.size(); });
  return count;
}

PredictionSet Forward(const HeadWeights& weights, const AnchorFeatures& feats) {
  if (feats.dim != weights.feature_dim) {
    throw Error(ErrorCode::kShapeMismatch,
                "feature width " + std::to_string(feats.dim) + " but weights expect " +
                    std::to_string(weights.feature_dim));
  }
  if (feats.values.size() != feats.anchors.size() * feats.dim) {
    throw Error(ErrorCode::kShapeMismatch, "feature matrix does not match the anchor count");
  }
  PredictionSet preds = PredictionSet::Zeros(feats.anchors, weights.modes, weights.horizon);
  MlpTrace trace;
  for (std::size_t n = 0; n < feats.anchors.size(); ++n) {
    const auto x = feats.Row(n);
    MlpForward(weights.class_head, x, trace);
    ScatterClass(trace.acts.back(), preds, n);
    MlpForward(weights.pos_head, x, trace);
    ScatterPos(trace.acts.back(), feats.ego_heading, preds, n);
    MlpForward(weights.mode_head, x, trace);
    ScatterModes(trace.acts.back(), preds, n);
    MlpForward(weights.traj_head, x, trace);
    ScatterTraj(trace.acts.back(), preds, n);
  }
  return preds;
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (epochs < 0) fail("epochs must be >= 0");
  if (modes < 1) fail("modes must be >= 1");
  if (horizon < 1 || horizon > kFutureSteps) {
    fail("horizon must lie in [1, " + std::to_string(kFutureSteps) + "]");
  }
  if (hidden < 1) fail("hidden must be >= 1");
  if (!(lambda_pos >= 0.0) || !(lambda_class >= 0.0)) fail("matching weights must be >= 0");
  if (!(loss_weights.class_weight >= 0.0) || !(loss_weights.pos_weight >= 0.0) ||
      !(loss_weights.traj_weight >= 0.0)) {
    fail("loss weights must be >= 0");
  }
  if (!(positive_weight > 0.0)) fail("positive_weight must be > 0");
  if (ray_count < 36) fail("ray_count must be >= 36");
}

PreparedScene PrepareScene(Scene scene, int ray_count, int horizon) {
  PreparedScene p;
  p.mask = ComputeVisibility(scene, ray_count);
  p.anchors = BuildAnchors(scene, p.mask);
  p.features = ExtractFeatures(scene, p.mask, p.anchors);
  p.gts = GroundTruthAtPredictionTime(scene, p.mask);
  for (auto& gt : p.gts) gt.future.resize(horizon);
  p.scene = std::move(scene);
  return p;
}

SceneGradient ComputeSceneGradient(const HeadWeights& weights, const PreparedScene& scene,
                                   const TrainConfig& config) {
  const AnchorFeatures& feats = scene.features;
  const std::size_t n_anchors = feats.anchors.size();
  const HeadingVec ego = feats.ego_heading;

  PredictionSet preds = PredictionSet::Zeros(feats.anchors, weights.modes, weights.horizon);
  std::vector<MlpTrace> class_traces(n_anchors);
  std::vector<MlpTrace> pos_traces(n_anchors);
  for (std::size_t n = 0; n < n_anchors; ++n) {
    const auto x = feats.Row(n);
    MlpForward(weights.class_head, x, class_traces[n]);
    ScatterClass(class_traces[n].acts.back(), preds, n);
    MlpForward(weights.pos_head, x, pos_traces[n]);
    ScatterPos(pos_traces[n].acts.back(), ego, preds, n);
  }

  std::vector<int> targets;
  ClassTermOptions class_term;
  if (config.regime == MatchingRegime::kHungarian) {
    targets = Match(preds, scene.gts, config.lambda_pos, config.lambda_class).sigma;
  } else {
    targets = ExactCellTargets(preds, scene.gts, scene.mask.grid);
    class_term.kind = ClassTermOptions::Kind::kWeightedOccupancy;
    class_term.positive_weight = config.positive_weight;
  }

  // Mode and trajectory heads only matter for anchors with a target.
  std::vector<std::size_t> targeted;
  for (std::size_t n = 0; n < n_anchors; ++n) {
    if (targets[n] != kNoObject) targeted.push_back(n);
  }
  std::vector<MlpTrace> mode_traces(targeted.size());
  std::vector<MlpTrace> traj_traces(targeted.size());
  for (std::size_t k = 0; k < targeted.size(); ++k) {
    const auto x = feats.Row(targeted[k]);
    MlpForward(weights.mode_head, x, mode_traces[k]);
    ScatterModes(mode_traces[k].acts.back(), preds, targeted[k]);
    MlpForward(weights.traj_head, x, traj_traces[k]);
    ScatterTraj(traj_traces[k].acts.back(), preds, targeted[k]);
  }

  SceneGradient result;
  LossGradients g;
  result.loss = EvaluateLoss(preds, scene.gts, targets, config.loss_weights, class_term, &g);
  result.grad = ZerosLike(weights);

  for (std::size_t n = 0; n < n_anchors; ++n) {
    MlpBackward(weights.class_head, class_traces[n], g.class_logits[n], result.grad.class_head);
  }
  const LossWeights& lw = config.loss_weights;
  const std::size_t per_anchor_traj = static_cast<std::size_t>(weights.modes) * weights.horizon;
  std::vector<double> buf;
  for (std::size_t k = 0; k < targeted.size(); ++k) {
    const std::size_t n = targeted[k];
    if (lw.pos_weight != 0.0 || lw.traj_weight != 0.0) {
      const Point2 gd = RotateGlobalToLocal(g.delta[n], ego);
      const Point2 gh = RotateGlobalToLocal(g.heading_raw[n], ego);
      const double grad_out[4] = {gd.x, gd.y, gh.x, gh.y};
      MlpBackward(weights.pos_head, pos_traces[n], grad_out, result.grad.pos_head);
    }
    if (lw.traj_weight != 0.0) {
      MlpBackward(weights.mode_head, mode_traces[k],
                  std::span<const double>(g.mode_logits.data() + n * weights.modes,
                                          weights.modes),
                  result.grad.mode_head);
      buf.resize(per_anchor_traj * 2);
      const Point2* src = g.displacements.data() + n * per_anchor_traj;
      for (std::size_t i = 0; i < per_anchor_traj; ++i) {
        buf[2 * i] = src[i].x;
        buf[2 * i + 1] = src[i].y;
      }
      MlpBackward(weights.traj_head, traj_traces[k], buf, result.grad.traj_head);
    }
  }
  return result;
}

AdamOptimizer::AdamOptimizer(const HeadWeights& shape, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  const std::size_t count = shape.ParameterCount();
  m_.assign(count, 0.0);
  v_.assign(count, 0.0);
}

void AdamOptimizer::Step(HeadWeights& weights, const HeadWeights& grad) {
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  std::vector<const std::vector<double>*> grads;
  ForEachParameterArray(grad, [&](const std::vector<double>& a) { grads.push_back(&a); });
  std::size_t array_index = 0;
  std::size_t offset = 0;
  ForEachParameterArray(weights, [&](std::vector<double>& a) {
    const std::vector<double>& g = *grads[array_index++];
    for (std::size_t i = 0; i < a.size(); ++i, ++offset) {
      m_[offset] = beta1_ * m_[offset] + (1.0 - beta1_) * g[i];
      v_[offset] = beta2_ * v_[offset] + (1.0 - beta2_) * g[i] * g[i];
      const double m_hat = m_[offset] / c1;
      const double v_hat = v_[offset] / c2;
      a[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  });
}

TrainResult Train(std::span<const PreparedScene> scenes, const TrainConfig& config,
                  std::span<const PreparedScene> probe) {
  config.Validate();
  if (scenes.empty()) throw Error(ErrorCode::kInvalidConfig, "no training scenes");

  TrainResult result;
  result.weights = HeadWeights::Initialize(feature::kCount, config.hidden, config.modes,
                                           config.horizon, config.seed);
  if (config.epochs == 0) return result;

  HeadWeights& weights = result.weights;
  AdamOptimizer optimizer(weights, config.learning_rate);
  Rng rng(Rng::Derive(config.seed, 1));
  std::vector<std::size_t> order(scenes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  long step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.Index(i)]);
    }
    EpochRecord record;
    record.epoch = epoch;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      HeadWeights batch_grad = ZerosLike(weights);
      for (std::size_t b = begin; b < end; ++b) {
        const SceneGradient sg = ComputeSceneGradient(weights, scenes[order[b]], config);
        if (!std::isfinite(sg.loss.total)) {
          throw Error(ErrorCode::kNonFiniteLoss,
                      "non-finite loss at optimizer step " + std::to_string(step) +
                          " (epoch " + std::to_string(epoch) + ", scene " +
                          std::to_string(order[b]) + ")");
        }
        record.class_loss += sg.loss.class_loss;
        record.pos_loss += sg.loss.pos_loss;
        record.traj_loss += sg.loss.traj_loss;
        record.total += sg.loss.total;
        std::vector<std::vector<double>*> dst;
        ForEachParameterArray(batch_grad, [&](std::vector<double>& a) { dst.push_back(&a); });
        std::size_t k = 0;
        ForEachParameterArray(sg.grad, [&](const std::vector<double>& a) {
          auto& d = *dst[k++];
          for (std::size_t i = 0; i < a.size(); ++i) d[i] += a[i];
        });
      }
      const double scale = 1.0 / static_cast<double>(end - begin);
      ForEachParameterArray(batch_grad, [&](std::vector<double>& a) {
        for (double& v : a) v *= scale;
      });
      optimizer.Step(weights, batch_grad);
      ++step;
    }
    const double count = static_cast<double>(scenes.size());
    record.class_loss /= count;
    record.pos_loss /= count;
    record.traj_loss /= count;
    record.total /= count;
    if (!probe.empty()) record.probe_redundancy = RedundancyRatio(weights, probe);
    result.log.push_back(record);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Inference

ScenePrediction PredictPrepared(const HeadWeights& weights, const PreparedScene& scene) {
  ScenePrediction out;
  out.preds = Forward(weights, scene.features);
  out.occupancy.reserve(out.preds.size());
  for (const auto& z : out.preds.class_logits) out.occupancy.push_back(OccupancyProbability(z));
  out.prepared = scene;
  return out;
}

ScenePrediction Predict(const HeadWeights& weights, const Scene& scene, int ray_count) {
  weights.Validate();
  return PredictPrepared(weights, PrepareScene(scene, ray_count, weights.horizon));
}

double RedundancyRatio(const HeadWeights& weights, std::span<const PreparedScene> scenes,
                       double threshold) {
  std::size_t positives = 0;
  std::size_t agents = 0;
  MlpTrace trace;
  for (const auto& scene : scenes) {
    agents += scene.gts.size();
    for (std::size_t n = 0; n < scene.features.anchors.size(); ++n) {
      MlpForward(weights.class_head, scene.features.Row(n), trace);
      ClassLogits z{};
      std::copy_n(trace.acts.back().begin(), kNumClasses, z.begin());
      if (OccupancyProbability(z) > threshold) ++positives;
    }
  }
  return agents == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(agents);
}

}  // namespace occmatch
