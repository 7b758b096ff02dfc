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


#include "occmatch/model_io.hpp"

#include "json.hpp"
#include "occmatch/error.hpp"
#include "occmatch/scene_io.hpp"

namespace occmatch {

using nlohmann::json;

namespace {

constexpr const char* kHeadNames[] = {"class", "position", "mode", "trajectory"};

[[noreturn]] void ParseFail(const std::string& what) {
  throw Error(ErrorCode::kParseError, "weights: " + what);
}

json MlpToJson(const Mlp& mlp) {
  json layers = json::array();
  for (const auto& l : mlp.layers) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"weight", l.weight}, {"bias", l.bias}});
  }
  return layers;
}

Mlp MlpFromJson(const json& j, const std::string& name) {
  if (!j.is_array()) ParseFail("head '" + name + "' must be an array of layers");
  Mlp mlp;
  try {
    for (const auto& lj : j) {
      DenseLayer l;
      l.in = lj.at("in").get<int>();
      l.out = lj.at("out").get<int>();
      l.weight = lj.at("weight").get<std::vector<double>>();
      l.bias = lj.at("bias").get<std::vector<double>>();
      mlp.layers.push_back(std::move(l));
    }
  } catch (const json::exception& e) {
    ParseFail("head '" + name + "': " + e.what());
  }
  return mlp;
}

}  // namespace

std::string SerializeWeights(const HeadWeights& weights) {
  json doc;
  doc["format"] = kWeightsFormatVersion;
  doc["feature_dim"] = weights.feature_dim;
  doc["hidden"] = weights.hidden;
  doc["modes"] = weights.modes;
  doc["horizon"] = weights.horizon;
  doc["heads"] = {{kHeadNames[0], MlpToJson(weights.class_head)},
                  {kHeadNames[1], MlpToJson(weights.pos_head)},
                  {kHeadNames[2], MlpToJson(weights.mode_head)},
                  {kHeadNames[3], MlpToJson(weights.traj_head)}};
  return doc.dump() + "\n";
}

HeadWeights ParseWeights(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    ParseFail(e.what());
  }
  if (!doc.is_object()) ParseFail("top level must be an object");
  HeadWeights w;
  try {
    if (doc.at("format").get<int>() != kWeightsFormatVersion) {
      ParseFail("unsupported format " + doc.at("format").dump());
    }
    w.feature_dim = doc.at("feature_dim").get<int>();
    w.hidden = doc.at("hidden").get<int>();
    w.modes = doc.at("modes").get<int>();
    w.horizon = doc.at("horizon").get<int>();
  } catch (const json::exception& e) {
    ParseFail(e.what());
  }
  const auto heads = doc.find("heads");
  if (heads == doc.end() || !heads->is_object()) ParseFail("missing 'heads'");
  Mlp* targets[] = {&w.class_head, &w.pos_head, &w.mode_head, &w.traj_head};
  for (int k = 0; k < 4; ++k) {
    if (!heads->contains(kHeadNames[k])) ParseFail(std::string("missing head '") + kHeadNames[k] + "'");
    *targets[k] = MlpFromJson(heads->at(kHeadNames[k]), kHeadNames[k]);
  }
  w.Validate();
  return w;
}

void WriteWeightsFile(const std::filesystem::path& path, const HeadWeights& weights) {
  WriteTextFile(path, SerializeWeights(weights));
}

HeadWeights ReadWeightsFile(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);  // reports its own path
  try {
    return ParseWeights(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string SerializeEpochRecord(const EpochRecord& record) {
  json j;
  j["epoch"] = record.epoch;
  j["class_loss"] = record.class_loss;
  j["pos_loss"] = record.pos_loss;
  j["traj_loss"] = record.traj_loss;
  j["total"] = record.total;
  j["probe_redundancy"] = record.probe_redundancy ? json(*record.probe_redundancy) : json(nullptr);
  return j.dump();
}

std::string SerializeTrainLog(std::span<const EpochRecord> log) {
  std::string out;
  for (const auto& r : log) out += SerializeEpochRecord(r) + "\n";
  return out;
}

}  // namespace occmatch
