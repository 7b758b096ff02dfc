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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "occmatch/assign.hpp"
#include "occmatch/demo.hpp"
#include "occmatch/geom.hpp"
#include "occmatch/loss.hpp"
#include "occmatch/metrics.hpp"
#include "occmatch/model.hpp"
#include "occmatch/rng.hpp"

namespace occmatch {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// ---------------------------------------------------------------------------

double BruteForceCost(const CostMatrix& c) {
  std::vector<int> cols(c.cols);
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  // Permutations of all columns visit every injective row map; the sum is
  // accumulated in row order to mirror exact integer arithmetic.
  do {
    double sum = 0.0;
    for (int g = 0; g < c.rows; ++g) sum += c(g, cols[g]);
    best = std::min(best, sum);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

Outcome SolverExactness() {
  const auto start = Clock::now();
  Rng rng(1001);
  int exact_int = 0, close_real = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    for (bool integer : {true, false}) {
      const int n = 1 + static_cast<int>(rng.Index(8));
      const int g = static_cast<int>(rng.Index(std::min(n, 6) + 1));
      CostMatrix c;
      c.rows = g;
      c.cols = n;
      for (int k = 0; k < g * n; ++k) {
        c.entries.push_back(integer ? static_cast<double>(rng.Index(41)) - 20.0
                                    : rng.Uniform(-10.0, 10.0));
      }
      const double solved = HungarianSolve(c).total_cost;
      const double brute = BruteForceCost(c);
      if (integer) {
        exact_int += solved == brute ? 1 : 0;
      } else {
        worst = std::max(worst, std::abs(solved - brute));
        close_real += std::abs(solved - brute) <= 1e-9 ? 1 : 0;
      }
    }
  }
  const double t = Seconds(start);
  return {exact_int == 1000 && close_real == 1000 && t < 5.0,
          Format("integer exact %d/1000, real within 1e-9 %d/1000 (max err %.2e), %.2fs",
                 exact_int, close_real, worst, t)};
}

Outcome CostFlip() {
  const auto start = Clock::now();
  const double lambdas[] = {1.0, 3.0};
  const CostFlipReport r = RunCostFlip(lambdas);
  // Independent derivation: A sits on the agent with P(car) = 0.2, B is
  // 1.5 m away with P(car) = 0.9.
  bool costs_ok = true;
  for (const auto& row : r.rows) {
    costs_ok &= std::abs(row.cost_a - (0.0 - row.lambda_class * 0.2)) < 1e-12;
    costs_ok &= std::abs(row.cost_b - (1.5 - row.lambda_class * 0.9)) < 1e-12;
  }
  const double t = Seconds(start);
  const bool pass = r.rows.size() == 2 && r.rows[0].matched == 0 && r.rows[1].matched == 1 &&
                    costs_ok && t < 1.0;
  return {pass, Format("lambda_class=1 -> %s, lambda_class=3 -> %s, costs %s, %.3fs",
                       r.rows[0].matched == 0 ? "A" : "B", r.rows[1].matched == 0 ? "A" : "B",
                       costs_ok ? "match derivation" : "differ", t)};
}

Outcome LossOrdering() {
  const auto start = Clock::now();
  const LossCaseReport r = RunLossCaseStudy();
  const LossCase& a = r.cases[0];
  const LossCase& b = r.cases[1];
  double class_ce_a = 0.0;
  for (const auto& anchor : a.anchors) class_ce_a += anchor.matched_loss_term;
  const bool b_order = b.without_matching > b.with_matching;
  const double identity = b.with_matching - (a.with_matching + b.positional_term);
  const bool a_agree = std::abs(a.with_matching - a.without_matching) <= class_ce_a + 1e-12;
  const double t = Seconds(start);
  return {b_order && identity <= 1e-9 && a_agree && t < 1.0,
          Format("(b) without %.6f > with %.6f; with(b) - with(a) - pos = %.2e; "
                 "(a) %.6f vs %.6f, %.3fs",
                 b.without_matching, b.with_matching, identity, a.with_matching,
                 a.without_matching, t)};
}

Outcome WorkedMetricExample() {
  const auto start = Clock::now();
  int found = 0;
  double lo = 1.0, hi = -1.0;
  for (int tp = 0; tp <= 3; ++tp) {
    for (int fp = 0; fp <= 20; ++fp) {
      for (int tn = 0; tn <= 200; ++tn) {
        for (int fn = 0; fn <= 3; ++fn) {
          const ConfusionMatrix cm{tp, fp, fn, tn};
          const AuxiliaryRates r = ComputeAuxiliaryRates(cm);
          if (r.degenerate || r.sensitivity != 1.0) continue;
          if (r.specificity < 0.915 || r.specificity > 0.925) continue;
          if (r.f1 < 0.175 || r.f1 > 0.185) continue;
          ++found;
          const double m = Mcc(cm);
          lo = std::min(lo, m);
          hi = std::max(hi, m);
        }
      }
    }
  }
  const double t = Seconds(start);
  return {found > 0 && lo >= 0.27 && hi <= 0.31 && t < 5.0,
          Format("%d matrices, MCC in [%.4f, %.4f], %.2fs", found, lo, hi, t)};
}

// ---------------------------------------------------------------------------

struct Instance {
  PredictionSet preds;
  std::vector<GroundTruth> gts;
};

Instance RandomInstance(Rng& rng) {
  constexpr int kAnchors = 12, kGts = 3, kModes = 4, kHorizon = 10;
  std::vector<Point2> pts;
  for (int n = 0; n < kAnchors; ++n) pts.push_back({rng.Uniform(-10, 10), rng.Uniform(-10, 10)});
  Instance inst{PredictionSet::Zeros(pts, kModes, kHorizon), {}};
  PredictionSet& p = inst.preds;
  for (int n = 0; n < kAnchors; ++n) {
    for (double& z : p.class_logits[n]) z = rng.Uniform(-3, 3);
    p.delta[n] = {rng.Uniform(-1, 1), rng.Uniform(-1, 1)};
    const double r = rng.Uniform(0.3, 2.0);
    const double a = rng.Uniform(-3.14159, 3.14159);
    p.heading_raw[n] = {r * std::cos(a), r * std::sin(a)};
  }
  for (double& z : p.mode_logits) z = rng.Uniform(-2, 2);
  for (Point2& d : p.displacements) d = {rng.Uniform(-0.5, 1.5), rng.Uniform(-0.5, 0.5)};
  for (int g = 0; g < kGts; ++g) {
    GroundTruth gt;
    gt.cls = static_cast<AgentClass>(rng.Index(3));
    gt.position = {rng.Uniform(-10, 10), rng.Uniform(-10, 10)};
    gt.heading = HeadingVec::FromAngle(rng.Uniform(-3.14159, 3.14159));
    Point2 q = gt.position;
    for (int t = 0; t < kHorizon; ++t) {
      q = q + RotateLocalToGlobal({rng.Uniform(0, 1), rng.Uniform(-0.2, 0.2)}, gt.heading);
      gt.future.push_back(q);
    }
    inst.gts.push_back(gt);
  }
  return inst;
}

void ForEachScalar(PredictionSet& p, const std::function<void(double&)>& fn) {
  for (auto& z : p.class_logits) for (double& v : z) fn(v);
  for (auto& d : p.delta) { fn(d.x); fn(d.y); }
  for (auto& h : p.heading_raw) { fn(h.x); fn(h.y); }
  for (double& v : p.mode_logits) fn(v);
  for (auto& d : p.displacements) { fn(d.x); fn(d.y); }
}

std::vector<double> Flatten(const LossGradients& g) {
  std::vector<double> out;
  for (const auto& z : g.class_logits) out.insert(out.end(), z.begin(), z.end());
  for (const auto& d : g.delta) { out.push_back(d.x); out.push_back(d.y); }
  for (const auto& h : g.heading_raw) { out.push_back(h.x); out.push_back(h.y); }
  out.insert(out.end(), g.mode_logits.begin(), g.mode_logits.end());
  for (const auto& d : g.displacements) { out.push_back(d.x); out.push_back(d.y); }
  return out;
}

Outcome GradientFidelity() {
  const auto start = Clock::now();
  Rng rng(1005);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Instance inst = RandomInstance(rng);
    const Assignment sigma = Match(inst.preds, inst.gts);
    const auto analytic = Flatten(TotalLossGradients(inst.preds, inst.gts, sigma));
    PredictionSet work = inst.preds;
    std::size_t k = 0;
    constexpr double h = 1e-5;
    ForEachScalar(work, [&](double& v) {
      const double saved = v;
      v = saved + h;
      const double up = TotalLoss(work, inst.gts, sigma).total;
      v = saved - h;
      const double down = TotalLoss(work, inst.gts, sigma).total;
      v = saved;
      const double fd = (up - down) / (2 * h);
      const double a = analytic[k++];
      worst = std::max(worst, std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)}));
    });
  }
  const double t = Seconds(start);
  return {worst < 1e-5 && t < 30.0,
          Format("max relative error %.2e over 100 instances, %.2fs", worst, t)};
}

Outcome RotationInvariants() {
  const auto start = Clock::now();
  Rng rng(1006);
  double norm_err = 0.0, inverse_err = 0.0, scale_err = 0.0;
  double gap_lo = 2.0, gap_hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const HeadingVec h = NormalizeHeading(rng.Uniform(-5, 5), rng.Uniform(-5, 5));
    const Point2 d{rng.Uniform(-100, 100), rng.Uniform(-100, 100)};
    const Point2 g = RotateLocalToGlobal(d, h);
    const double scale = std::max(1.0, Norm(d));
    norm_err = std::max(norm_err, std::abs(Norm(g) - Norm(d)) / scale);
    inverse_err = std::max(inverse_err, Distance(RotateGlobalToLocal(g, h), d) / scale);
    const double rc = rng.Uniform(-5, 5), rs = rng.Uniform(-5, 5);
    const double k = std::exp(rng.Uniform(-6, 6));
    const HeadingVec u = NormalizeHeading(rc, rs);
    const HeadingVec v = NormalizeHeading(k * rc, k * rs);
    scale_err = std::max({scale_err, std::abs(u.c - v.c), std::abs(u.s - v.s)});
    const double gap = HeadingCosineGap(h, u);
    gap_lo = std::min(gap_lo, gap);
    gap_hi = std::max(gap_hi, gap);
  }
  const double t = Seconds(start);
  return {norm_err <= 1e-12 && inverse_err <= 1e-12 && scale_err <= 1e-12 && gap_lo >= 0.0 &&
              gap_hi <= 2.0 && t < 1.0,
          Format("norm %.1e, inverse %.1e, scale %.1e, gap in [%.4f, %.4f], %.3fs", norm_err,
                 inverse_err, scale_err, gap_lo, gap_hi, t)};
}

Outcome MccConventions() {
  const auto start = Clock::now();
  Rng rng(1007);
  const std::vector<double> thresholds = {0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 8.0};
  int monotone = 0, totals = 0, checks = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<Point2> preds, gts;
    const auto np = rng.Index(20), ng = rng.Index(20);
    for (std::uint64_t k = 0; k < np; ++k) preds.push_back({rng.Uniform(-10, 10), rng.Uniform(-10, 10)});
    for (std::uint64_t k = 0; k < ng; ++k) gts.push_back({rng.Uniform(-10, 10), rng.Uniform(-10, 10)});
    const auto count = static_cast<std::int64_t>(np + ng + rng.Index(300));
    const auto cms = ThresholdConfusions(preds, gts, count, thresholds);
    bool ok = true;
    for (std::size_t k = 0; k < cms.size(); ++k) {
      ++checks;
      totals += cms[k].Total() == count ? 1 : 0;
      if (k > 0 && Mcc(cms[k]) < Mcc(cms[k - 1])) ok = false;
    }
    monotone += ok ? 1 : 0;
  }
  const bool zero = Mcc({0, 0, 3, 7}) == 0.0 && Mcc({0, 4, 0, 7}) == 0.0 &&
                    Mcc({3, 0, 0, 0}) == 0.0 && Mcc({0, 0, 0, 9}) == 0.0;
  const double t = Seconds(start);
  return {monotone == 100 && totals == checks && zero && t < 5.0,
          Format("monotone %d/100, totals %d/%d, zero-marginal %s, %.3fs", monotone, totals,
                 checks, zero ? "0" : "nonzero", t)};
}

// ---------------------------------------------------------------------------
// Golden experiment shared by the comparative and ablation criteria: scene i
// of level k uses the same seed as `gen --sweep --seed 7`; the first 80 per
// level train, the last 20 evaluate.

constexpr std::uint64_t kGoldenSeed = 7;
constexpr int kPerLevel = 100;
constexpr int kTrainPerLevel = 80;
constexpr int kGoldenEpochs = 30;

struct RegimeResult {
  std::string name;
  double mcc2 = 0.0;
  double redundancy = 0.0;
  double seconds = 0.0;
  HeadWeights weights;
};

struct Golden {
  RegimeResult hungarian, no_traj, exact;
  HeadWeights init;
  double seconds = 0.0;
};

Golden RunGolden() {
  const auto start = Clock::now();
  std::vector<PreparedScene> all(cli::kSweepLevels.size() * kPerLevel);
  {
    std::vector<std::thread> pool;
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t j = w; j < all.size(); j += workers) {
          const int k = static_cast<int>(j / kPerLevel);
          const int i = static_cast<int>(j % kPerLevel);
          GeneratorConfig config;
          config.occlusion_level = cli::kSweepLevels[k];
          all[j] = PrepareScene(GenerateScene(config, cli::SceneSeed(kGoldenSeed, k, i)));
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<PreparedScene> train, eval;
  for (std::size_t j = 0; j < all.size(); ++j) {
    (static_cast<int>(j % kPerLevel) < kTrainPerLevel ? train : eval).push_back(std::move(all[j]));
  }

  auto run = [&](RegimeResult& r, const TrainConfig& config) {
    const auto t0 = Clock::now();
    r.weights = Train(train, config).weights;
    const EvalOptions options;
    std::vector<SceneMetrics> metrics;
    std::int64_t positives = 0, agents = 0;
    for (const auto& s : eval) {
      metrics.push_back(EvaluateScene(s, PredictPrepared(r.weights, s).preds, options));
      positives += metrics.back().positives;
      agents += metrics.back().gt_agents;
    }
    r.mcc2 = MccAtThresholds(metrics, options.thresholds.size())[2];
    r.redundancy = static_cast<double>(positives) / static_cast<double>(agents);
    r.seconds = Seconds(t0);
  };

  Golden g;
  TrainConfig base;
  base.epochs = kGoldenEpochs;
  base.seed = kGoldenSeed;
  TrainConfig no_traj = base;
  no_traj.loss_weights.traj_weight = 0.0;
  TrainConfig exact = base;
  exact.regime = MatchingRegime::kExactWeightedCe;
  g.hungarian.name = "hungarian";
  g.no_traj.name = "hungarian-no-traj";
  g.exact.name = "exact-ce";
  std::thread a([&] { run(g.hungarian, base); });
  std::thread b([&] { run(g.no_traj, no_traj); });
  std::thread c([&] { run(g.exact, exact); });
  a.join();
  b.join();
  c.join();
  g.init = HeadWeights::Initialize(feature::kCount, base.hidden, base.modes, base.horizon,
                                   base.seed);
  g.seconds = Seconds(start);
  return g;
}

Outcome Comparative(const Golden& g) {
  const bool pass = g.hungarian.mcc2 > g.exact.mcc2 && g.hungarian.redundancy < g.exact.redundancy &&
                    g.seconds < 15 * 60.0;
  return {pass, Format("MCC@2m hungarian %.4f vs exact-ce %.4f; redundancy %.4f vs %.4f; "
                       "experiment %.0fs",
                       g.hungarian.mcc2, g.exact.mcc2, g.hungarian.redundancy,
                       g.exact.redundancy, g.seconds)};
}

Outcome Ablation(const Golden& g) {
  auto same = [](const Mlp& a, const Mlp& b) {
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
      if (a.layers[l].weight != b.layers[l].weight || a.layers[l].bias != b.layers[l].bias) {
        return false;
      }
    }
    return a.layers.size() == b.layers.size();
  };
  const bool frozen = same(g.no_traj.weights.traj_head, g.init.traj_head) &&
                      same(g.no_traj.weights.mode_head, g.init.mode_head);
  return {g.no_traj.mcc2 >= g.hungarian.mcc2 && frozen,
          Format("MCC@2m no-traj %.4f vs full %.4f; trajectory heads %s", g.no_traj.mcc2,
                 g.hungarian.mcc2, frozen ? "at initialization" : "moved")};
}

// ---------------------------------------------------------------------------

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "occmatch");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Outcome Determinism() {
  const auto start = Clock::now();
  const fs::path root = fs::temp_directory_path() / "occmatch_acceptance_determinism";
  fs::remove_all(root);
  bool ran = true;
  for (const char* tag : {"a", "b"}) {
    const fs::path d = root / tag;
    ran &= Cli({"gen", "--count", "3", "--sweep", "--seed", "11", "--out-dir",
                (d / "scenes").string()}) == 0;
    ran &= Cli({"train", "--scenes", (d / "scenes").string(), "--epochs", "3", "--seed", "11",
                "--probe-count", "2", "--out", (d / "weights.json").string()}) == 0;
    ran &= Cli({"eval", "--weights", (d / "weights.json").string(), "--scenes",
                (d / "scenes").string(), "--out", (d / "metrics.csv").string()}) == 0;
  }
  int files = 0, identical = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    ++files;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    identical += Slurp(entry.path()) == Slurp(root / "b" / rel) ? 1 : 0;
  }
  fs::remove_all(root);
  const double t = Seconds(start);
  return {ran && files > 0 && identical == files,
          Format("%d/%d files byte-identical across reruns, %.1fs", identical, files, t)};
}

}  // namespace
}  // namespace occmatch

int main() {
  using namespace occmatch;
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  auto guarded = [](const std::function<Outcome()>& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };
  report(1, "solver exactness", guarded(SolverExactness));
  report(2, "lambda flip", guarded(CostFlip));
  report(3, "loss ordering", guarded(LossOrdering));
  report(4, "worked metric example", guarded(WorkedMetricExample));
  report(5, "gradient fidelity", guarded(GradientFidelity));
  report(6, "rotation and heading invariants", guarded(RotationInvariants));
  report(7, "MCC@d conventions", guarded(MccConventions));
  Golden golden;
  std::string golden_error;
  try {
    golden = RunGolden();
  } catch (const std::exception& e) {
    golden_error = e.what();
  }
  if (golden_error.empty()) {
    report(8, "hungarian vs exact-ce", Comparative(golden));
    report(9, "trajectory ablation", Ablation(golden));
  } else {
    report(8, "hungarian vs exact-ce", {false, "exception: " + golden_error});
    report(9, "trajectory ablation", {false, "exception: " + golden_error});
  }
  report(10, "determinism", guarded(Determinism));
  return failures == 0 ? 0 : 1;
}
