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


#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "occmatch/demo.hpp"
#include "occmatch/error.hpp"
#include "occmatch/metrics.hpp"
#include "occmatch/model.hpp"
#include "occmatch/model_io.hpp"
#include "occmatch/rng.hpp"
#include "occmatch/scene_io.hpp"

namespace occmatch::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutDirEnv = "OCCMATCH_OUT_DIR";
constexpr std::uint64_t kProbeStream = 0x70726f6265ULL;

// Binds options to fields and layers a config file underneath them: a file
// value applies only when the matching flag was not given.
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* Add(const std::string& key, T& field, const std::string& help) {
    auto* opt = app_->add_option(Flag(key), field, help)->capture_default_str();
    entries_[key] = {opt, [&field, key](const json& j) {
                       try {
                         field = j.get<T>();
                       } catch (const json::exception&) {
                         throw Error(ErrorCode::kInvalidConfig,
                                     "config key '" + key + "' has the wrong type");
                       }
                     }};
    return opt;
  }

  CLI::Option* AddFlag(const std::string& key, bool& field, const std::string& help) {
    auto* opt = app_->add_flag(Flag(key), field, help);
    entries_[key] = {opt, [&field, key](const json& j) {
                       if (!j.is_boolean()) {
                         throw Error(ErrorCode::kInvalidConfig,
                                     "config key '" + key + "' must be a boolean");
                       }
                       field = j.get<bool>();
                     }};
    return opt;
  }

  void AddConfigOption() {
    app_->add_option("--config", config_path_, "JSON config file; flags override its values");
  }

  bool Given(const std::string& key) const { return entries_.at(key).option->count() > 0; }

  void ApplyConfigFile() {
    if (config_path_.empty()) return;
    json doc;
    try {
      doc = json::parse(ReadTextFile(config_path_));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParseError, config_path_ + ": " + e.what());
    }
    if (!doc.is_object()) {
      throw Error(ErrorCode::kInvalidConfig, config_path_ + ": config must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
      const auto it = entries_.find(key);
      if (it == entries_.end()) {
        throw Error(ErrorCode::kInvalidConfig, config_path_ + ": unknown config key '" + key + "'");
      }
      if (it->second.option->count() == 0) it->second.assign(value);
    }
  }

 private:
  struct Entry {
    CLI::Option* option = nullptr;
    std::function<void(const json&)> assign;
  };

  static std::string Flag(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
  }

  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, Entry> entries_;
};

// Out-dir precedence: flag, environment, config file, default. Call after
// the config file has been applied.
void ResolveOutDir(const Settings& s, const std::string& key, std::string& out_dir) {
  if (s.Given(key)) return;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') out_dir = env;
}

// Runs fn(i) for i in [0, n) on up to jobs threads. Results must be written
// to per-index slots; the first failing index is rethrown.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string FormatLevel(double level) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "level_%.2f", level);
  return buf;
}

std::string SceneFileName(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04d.json", index);
  return buf;
}

std::vector<PreparedScene> LoadScenes(const std::string& dir, int ray_count, int horizon,
                                      int jobs) {
  const auto files = ListSceneFiles(dir);
  if (files.empty()) throw Error(ErrorCode::kIoError, dir + ": no scene files found");
  std::vector<Scene> scenes(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) scenes[i] = ReadSceneFile(files[i]);
  std::vector<PreparedScene> prepared(files.size());
  ParallelFor(files.size(), jobs, [&](std::size_t i) {
    prepared[i] = PrepareScene(scenes[i], ray_count, horizon);
  });
  return prepared;
}

std::vector<double> ParseThresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig, "empty entry in threshold list '" + text + "'");
    }
    item = item.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::kInvalidConfig, "threshold '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// gen

struct GenOptions {
  int count = 10;
  double occlusion_level = 0.5;
  std::uint64_t seed = 1;
  std::string out_dir = "scenes";
  bool sweep = false;
  int jobs = 1;
};

void RunGen(const GenOptions& o, std::ostream& out) {
  if (o.count < 1) throw Error(ErrorCode::kInvalidConfig, "count must be >= 1");
  if (o.jobs < 1) throw Error(ErrorCode::kInvalidConfig, "jobs must be >= 1");
  std::vector<std::pair<int, double>> levels;  // (level index, level)
  if (o.sweep) {
    for (std::size_t k = 0; k < kSweepLevels.size(); ++k) {
      levels.emplace_back(static_cast<int>(k), kSweepLevels[k]);
    }
  } else {
    levels.emplace_back(-1, o.occlusion_level);
  }

  json manifest;
  manifest["format"] = kSceneFormatVersion;
  manifest["seed"] = o.seed;
  manifest["count"] = o.count;
  manifest["sweep"] = o.sweep;
  json files = json::array();
  for (const auto& [k, level] : levels) {
    GeneratorConfig config;
    config.occlusion_level = level;
    config.Validate();
    std::vector<Scene> scenes(o.count);
    ParallelFor(o.count, o.jobs, [&](std::size_t i) {
      scenes[i] = GenerateScene(config, SceneSeed(o.seed, k, static_cast<int>(i)));
    });
    const fs::path dir = o.sweep ? fs::path(o.out_dir) / FormatLevel(level) : fs::path(o.out_dir);
    for (int i = 0; i < o.count; ++i) {
      const fs::path rel = o.sweep ? fs::path(FormatLevel(level)) / SceneFileName(i)
                                   : fs::path(SceneFileName(i));
      WriteSceneFile(dir / SceneFileName(i), scenes[i]);
      files.push_back({{"file", rel.generic_string()},
                       {"occlusion_level", level},
                       {"seed", scenes[i].seed}});
    }
  }
  manifest["files"] = std::move(files);
  WriteTextFile(fs::path(o.out_dir) / "manifest.json", manifest.dump(1) + "\n");
  out << "wrote " << o.count * levels.size() << " scenes to " << o.out_dir << "\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string scenes;
  std::string regime = "hungarian";
  std::string out = "weights.json";
  std::string log;
  int epochs = 30;
  double learning_rate = 1e-3;
  int batch_size = 8;
  std::uint64_t seed = 1;
  int modes = 6;
  int horizon = kFutureSteps;
  int hidden = 64;
  double lambda_pos = kDefaultLambdaPos;
  double lambda_class = kDefaultLambdaClass;
  double class_weight = 1.0;
  double pos_weight = 1.0;
  double traj_weight = 1.0;
  double positive_weight = kDefaultPositiveWeight;
  int ray_count = kDefaultRayCount;
  int probe_count = 10;
  int jobs = 1;
};

TrainConfig ToTrainConfig(const TrainOptions& o) {
  TrainConfig c;
  c.learning_rate = o.learning_rate;
  c.batch_size = o.batch_size;
  c.epochs = o.epochs;
  c.seed = o.seed;
  c.modes = o.modes;
  c.horizon = o.horizon;
  c.hidden = o.hidden;
  c.lambda_pos = o.lambda_pos;
  c.lambda_class = o.lambda_class;
  c.loss_weights = {o.class_weight, o.pos_weight, o.traj_weight};
  c.positive_weight = o.positive_weight;
  c.ray_count = o.ray_count;
  if (o.regime == "hungarian") {
    c.regime = MatchingRegime::kHungarian;
  } else if (o.regime == "hungarian-no-traj") {
    c.regime = MatchingRegime::kHungarian;
    c.loss_weights.traj_weight = 0.0;
  } else if (o.regime == "exact-ce") {
    c.regime = MatchingRegime::kExactWeightedCe;
  } else {
    throw Error(ErrorCode::kInvalidConfig,
                "unknown regime '" + o.regime + "' (hungarian, hungarian-no-traj, exact-ce)");
  }
  c.Validate();
  return c;
}

void RunTrain(const TrainOptions& o, std::ostream& out) {
  const TrainConfig config = ToTrainConfig(o);
  if (o.scenes.empty()) throw Error(ErrorCode::kInvalidConfig, "--scenes is required");
  if (o.probe_count < 0) throw Error(ErrorCode::kInvalidConfig, "probe_count must be >= 0");
  if (o.jobs < 1) throw Error(ErrorCode::kInvalidConfig, "jobs must be >= 1");
  const auto scenes = LoadScenes(o.scenes, config.ray_count, config.horizon, o.jobs);

  std::vector<PreparedScene> probe(o.probe_count);
  ParallelFor(probe.size(), o.jobs, [&](std::size_t i) {
    GeneratorConfig gen;
    probe[i] = PrepareScene(GenerateScene(gen, Rng::Derive(o.seed ^ kProbeStream, i)),
                            config.ray_count, config.horizon);
  });

  const TrainResult result = Train(scenes, config, probe);
  const std::string log_path = o.log.empty() ? o.out + ".log.jsonl" : o.log;
  WriteWeightsFile(o.out, result.weights);
  WriteTextFile(log_path, SerializeTrainLog(result.log));
  out << "trained " << o.regime << " on " << scenes.size() << " scenes for " << o.epochs
      << " epochs; weights " << o.out << ", log " << log_path << "\n";
}

// ---------------------------------------------------------------------------
// eval

struct EvalCliOptions {
  std::string weights;
  std::string scenes;
  std::string thresholds = "0,1,2,3,4";
  std::string out;
  double occupancy_threshold = 0.5;
  int ray_count = kDefaultRayCount;
  int modes = 6;
  int horizon = kFutureSteps;
  int jobs = 1;
};

void RunEval(const EvalCliOptions& o, std::ostream& out) {
  if (o.weights.empty()) throw Error(ErrorCode::kInvalidConfig, "--weights is required");
  if (o.scenes.empty()) throw Error(ErrorCode::kInvalidConfig, "--scenes is required");
  if (o.jobs < 1) throw Error(ErrorCode::kInvalidConfig, "jobs must be >= 1");
  EvalOptions options;
  options.thresholds = ParseThresholds(o.thresholds);
  options.occupancy_threshold = o.occupancy_threshold;
  options.Validate();

  // "@oracle" and "@none" are stub predictors for harness checks.
  std::optional<HeadWeights> weights;
  int modes = o.modes;
  int horizon = o.horizon;
  if (o.weights != "@oracle" && o.weights != "@none") {
    weights = ReadWeightsFile(o.weights);
    modes = weights->modes;
    horizon = weights->horizon;
  } else if (modes < 1 || horizon < 1 || horizon > kFutureSteps) {
    throw Error(ErrorCode::kInvalidConfig, "stub predictors need modes >= 1 and a valid horizon");
  }

  const auto scenes = LoadScenes(o.scenes, o.ray_count, horizon, o.jobs);
  std::vector<SceneMetrics> metrics(scenes.size());
  ParallelFor(scenes.size(), o.jobs, [&](std::size_t i) {
    PredictionSet preds;
    if (weights) {
      preds = Forward(*weights, scenes[i].features);
    } else if (o.weights == "@oracle") {
      preds = OraclePredictions(scenes[i], modes, horizon);
    } else {
      preds = NullPredictions(scenes[i], modes, horizon);
    }
    metrics[i] = EvaluateScene(scenes[i], preds, options);
  });
  const auto rows = AggregateMetrics(metrics, options);
  const std::string csv = FormatMetricsCsv(rows, options.thresholds);
  if (!o.out.empty()) WriteTextFile(o.out, csv);
  out << csv;
}

// ---------------------------------------------------------------------------
// demo

struct DemoOptions {
  std::string which;
  std::string out_dir = "demo";
  std::string scene;
  std::string weights;
  int ray_count = kDefaultRayCount;
  std::uint64_t seed = 1;
};

void RunDemo(const DemoOptions& o, std::ostream& out) {
  const fs::path dir(o.out_dir);
  if (o.which == "cost-flip") {
    const double lambdas[] = {1.0, 3.0};
    const CostFlipReport report = RunCostFlip(lambdas);
    WriteTextFile(dir / "cost_flip.csv", report.ToText());
    WriteTextFile(dir / "cost_flip.svg", RenderCostFlipSvg(report));
    out << report.ToText();
  } else if (o.which == "loss-cases") {
    const LossCaseReport report = RunLossCaseStudy();
    WriteTextFile(dir / "loss_cases.csv", report.ToText());
    WriteTextFile(dir / "loss_cases.svg", RenderLossCasesSvg(report));
    out << report.ToText();
  } else if (o.which == "scene-render") {
    Scene scene = o.scene.empty() ? GenerateScene(GeneratorConfig{}, SceneSeed(o.seed, -1, 0))
                                  : ReadSceneFile(o.scene);
    const HeadWeights weights =
        o.weights.empty() ? HeadWeights::Initialize(feature::kCount, 64, 6, kFutureSteps, o.seed)
                          : ReadWeightsFile(o.weights);
    weights.Validate();
    const ScenePrediction prediction = Predict(weights, scene, o.ray_count);
    const std::string svg = RenderSceneSvg(prediction);
    WriteTextFile(dir / "scene_render.svg", svg);
    std::size_t positives = 0;
    for (double p : prediction.occupancy) positives += p > 0.5 ? 1 : 0;
    out << "anchors," << prediction.preds.size() << "\npositives," << positives << "\nagents,"
        << prediction.prepared.gts.size() << "\n";
  } else {
    throw Error(ErrorCode::kInvalidConfig,
                "unknown demo '" + o.which + "' (cost-flip, loss-cases, scene-render)");
  }
  out << "wrote " << o.which << " outputs to " << o.out_dir << "\n";
}

// ---------------------------------------------------------------------------
// match

CostMatrix ParseCostCsv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream lines(text);
  std::string line;
  int row = 0;
  while (std::getline(lines, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> values;
    std::stringstream cells(line);
    std::string cell;
    int col = 0;
    while (std::getline(cells, cell, ',')) {
      ++col;
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      const std::string item =
          first == std::string::npos ? "" : cell.substr(first, last - first + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() ||
          !std::isfinite(v)) {
        throw Error(ErrorCode::kParseError, "row " + std::to_string(row) + ", column " +
                                                std::to_string(col) + ": '" + item +
                                                "' is not a finite number");
      }
      values.push_back(v);
    }
    if (!line.empty() && line.back() == ',') {
      throw Error(ErrorCode::kParseError, "row " + std::to_string(row) + ", column " +
                                              std::to_string(col + 1) + ": empty cell");
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw Error(ErrorCode::kParseError, "row " + std::to_string(row) + " has " +
                                              std::to_string(values.size()) +
                                              " columns, expected " +
                                              std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(values));
  }
  return CostMatrix::FromRows(rows);
}

void RunMatch(const std::string& cost_file, std::ostream& out) {
  CostMatrix cost;
  try {
    cost = ParseCostCsv(ReadTextFile(cost_file));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseError) throw;
    throw Error(e.code(), cost_file + ": " + e.what());
  }
  const Assignment a = HungarianSolve(cost);
  json pairs = json::array();
  json none = json::array();
  const auto owner = a.PredictionForGroundTruth(cost.rows);
  for (int g = 0; g < cost.rows; ++g) pairs.push_back({g, owner[g]});
  for (int n = 0; n < cost.cols; ++n) {
    if (a.sigma[n] == kNoObject) none.push_back(n);
  }
  json doc;
  doc["pairs"] = std::move(pairs);
  doc["no_object"] = std::move(none);
  doc["total_cost"] = a.total_cost;
  out << doc.dump() << "\n";
}

std::string Quote(const std::string& s) {
  std::string q;
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return q;
}

int Fail(std::ostream& err, std::string_view code, const std::string& message, int status) {
  err << "error: code=" << code << " message=\"" << Quote(message) << "\"\n";
  return status;
}

}  // namespace

std::uint64_t SceneSeed(std::uint64_t seed, int level_index, int scene_index) {
  const std::uint64_t base = level_index < 0 ? seed : Rng::Derive(seed, level_index);
  return Rng::Derive(base, static_cast<std::uint64_t>(scene_index));
}

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"occmatch: occlusion-aware occupancy matching toolkit"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic scene files");
  Settings gen_s(gen_cmd);
  gen_s.Add("count", gen.count, "Scenes per occlusion level");
  gen_s.Add("occlusion_level", gen.occlusion_level, "Occluder probability per agent, [0, 1]");
  gen_s.Add("seed", gen.seed, "Base seed");
  gen_s.Add("out_dir", gen.out_dir, "Output directory (env " + std::string(kOutDirEnv) + ")");
  gen_s.AddFlag("sweep", gen.sweep, "One subdirectory per level in {0, 0.25, 0.5, 0.75, 1}");
  gen_s.Add("jobs", gen.jobs, "Worker threads");
  gen_s.AddConfigOption();

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train the prediction heads");
  Settings train_s(train_cmd);
  train_s.Add("scenes", train.scenes, "Directory of scene files");
  train_s.Add("regime", train.regime, "hungarian | hungarian-no-traj | exact-ce");
  train_s.Add("out", train.out, "Weights file");
  train_s.Add("log", train.log, "Epoch log (default <out>.log.jsonl)");
  train_s.Add("epochs", train.epochs, "Epochs");
  train_s.Add("learning_rate", train.learning_rate, "Adam step size");
  train_s.Add("batch_size", train.batch_size, "Scenes per optimizer step");
  train_s.Add("seed", train.seed, "Initialization and shuffling seed");
  train_s.Add("modes", train.modes, "Trajectory modes M");
  train_s.Add("horizon", train.horizon, "Future steps T");
  train_s.Add("hidden", train.hidden, "Hidden width per layer");
  train_s.Add("lambda_pos", train.lambda_pos, "Matching cost position weight");
  train_s.Add("lambda_class", train.lambda_class, "Matching cost class weight");
  train_s.Add("class_weight", train.class_weight, "Loss weight of the class term");
  train_s.Add("pos_weight", train.pos_weight, "Loss weight of the positional term");
  train_s.Add("traj_weight", train.traj_weight, "Loss weight of the trajectory term");
  train_s.Add("positive_weight", train.positive_weight, "exact-ce weight of occupied targets");
  train_s.Add("ray_count", train.ray_count, "Visibility rays per step");
  train_s.Add("probe_count", train.probe_count, "Held-out probe scenes for the redundancy log");
  train_s.Add("jobs", train.jobs, "Worker threads for scene preparation");
  train_s.AddConfigOption();

  EvalCliOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate weights on scene files");
  Settings eval_s(eval_cmd);
  eval_s.Add("weights", eval.weights, "Weights file, or @oracle / @none stubs");
  eval_s.Add("scenes", eval.scenes, "Directory of scene files");
  eval_s.Add("thresholds", eval.thresholds, "Comma-separated distance thresholds in metres");
  eval_s.Add("out", eval.out, "Metrics CSV");
  eval_s.Add("occupancy_threshold", eval.occupancy_threshold, "Positive when 1 - P(none) exceeds this");
  eval_s.Add("ray_count", eval.ray_count, "Visibility rays per step");
  eval_s.Add("modes", eval.modes, "Modes for stub predictors");
  eval_s.Add("horizon", eval.horizon, "Horizon for stub predictors");
  eval_s.Add("jobs", eval.jobs, "Worker threads");
  eval_s.AddConfigOption();

  DemoOptions demo;
  auto* demo_cmd = app.add_subcommand("demo", "Worked scenarios with SVG output");
  demo_cmd->add_option("which", demo.which, "cost-flip | loss-cases | scene-render")->required();
  Settings demo_s(demo_cmd);
  demo_s.Add("out_dir", demo.out_dir, "Output directory (env " + std::string(kOutDirEnv) + ")");
  demo_s.Add("scene", demo.scene, "Scene file for scene-render (default: generated)");
  demo_s.Add("weights", demo.weights, "Weights for scene-render (default: initial)");
  demo_s.Add("ray_count", demo.ray_count, "Visibility rays per step");
  demo_s.Add("seed", demo.seed, "Seed for the generated scene and initial weights");
  demo_s.AddConfigOption();

  std::string cost_file;
  auto* match_cmd = app.add_subcommand("match", "Solve an assignment from a CSV cost matrix");
  match_cmd->add_option("cost_file", cost_file, "Rows are ground truths, columns predictions")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    // Subcommand help arrives through the same path.
    if (e.get_exit_code() == 0) {
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return 0;
    }
    return Fail(err, "InvalidConfig", e.what(), 2);
  }

  try {
    if (gen_cmd->parsed()) {
      gen_s.ApplyConfigFile();
      ResolveOutDir(gen_s, "out_dir", gen.out_dir);
      if (!(gen.occlusion_level >= 0.0 && gen.occlusion_level <= 1.0)) {
        throw Error(ErrorCode::kInvalidConfig, "occlusion_level must lie in [0, 1]");
      }
      RunGen(gen, out);
    } else if (train_cmd->parsed()) {
      train_s.ApplyConfigFile();
      RunTrain(train, out);
    } else if (eval_cmd->parsed()) {
      eval_s.ApplyConfigFile();
      RunEval(eval, out);
    } else if (demo_cmd->parsed()) {
      demo_s.ApplyConfigFile();
      ResolveOutDir(demo_s, "out_dir", demo.out_dir);
      RunDemo(demo, out);
    } else if (match_cmd->parsed()) {
      RunMatch(cost_file, out);
    }
  } catch (const Error& e) {
    return Fail(err, ErrorCodeName(e.code()), e.what(), 1);
  } catch (const std::exception& e) {
    return Fail(err, "Internal", e.what(), 1);
  }
  return 0;
}

}  // namespace occmatch::cli
