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


#include "occmatch/scene_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "occmatch/error.hpp"

namespace occmatch {

using nlohmann::json;

namespace {

[[noreturn]] void ParseFail(const std::string& what) {
  throw Error(ErrorCode::kParseError, "scene: " + what);
}

template <typename T>
T Field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) ParseFail(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    ParseFail(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string SerializeScene(const Scene& scene) {
  json doc;
  doc["format"] = kSceneFormatVersion;
  doc["seed"] = scene.seed;
  doc["occlusion_level"] = scene.occlusion_level;
  doc["region"] = {{"min_x", scene.region.min_x},
                   {"min_y", scene.region.min_y},
                   {"max_x", scene.region.max_x},
                   {"max_y", scene.region.max_y}};
  doc["ego"] = {{"x", scene.ego_position.x},
                {"y", scene.ego_position.y},
                {"cos", scene.ego_heading.c},
                {"sin", scene.ego_heading.s}};
  json agents = json::array();
  for (const auto& agent : scene.agents) {
    json states = json::array();
    for (int step = 0; step < static_cast<int>(agent.states.size()); ++step) {
      const auto& s = agent.states[step];
      states.push_back({{"t", StepTime(step)},
                        {"x", s.position.x},
                        {"y", s.position.y},
                        {"cos", s.heading.c},
                        {"sin", s.heading.s}});
    }
    agents.push_back({{"id", agent.id},
                      {"class", std::string(AgentClassName(agent.cls))},
                      {"dims", {{"length", agent.length}, {"width", agent.width}}},
                      {"occluder", agent.occluder},
                      {"states", std::move(states)}});
  }
  doc["agents"] = std::move(agents);
  json obstacles = json::array();
  for (const auto& s : scene.static_obstacles) {
    obstacles.push_back({{"ax", s.a.x}, {"ay", s.a.y}, {"bx", s.b.x}, {"by", s.b.y}});
  }
  doc["obstacles"] = std::move(obstacles);
  return doc.dump(1) + "\n";
}

Scene ParseScene(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    ParseFail(std::string("malformed document: ") + e.what());
  }
  if (Field<int>(doc, "format") != kSceneFormatVersion) ParseFail("unsupported format version");

  Scene scene;
  scene.seed = Field<std::uint64_t>(doc, "seed");
  scene.occlusion_level = Field<double>(doc, "occlusion_level");
  if (!(scene.occlusion_level >= 0.0 && scene.occlusion_level <= 1.0)) {
    ParseFail("occlusion_level outside [0, 1]");
  }
  const json& region = doc["region"];
  scene.region = {Field<double>(region, "min_x"), Field<double>(region, "min_y"),
                  Field<double>(region, "max_x"), Field<double>(region, "max_y")};
  if (!(scene.region.max_x > scene.region.min_x && scene.region.max_y > scene.region.min_y)) {
    ParseFail("empty region");
  }
  const json& ego = doc["ego"];
  scene.ego_position = {Field<double>(ego, "x"), Field<double>(ego, "y")};
  scene.ego_heading = {Field<double>(ego, "cos"), Field<double>(ego, "sin")};
  if (!scene.region.Contains(scene.ego_position)) ParseFail("ego outside region");

  const json& agents = doc["agents"];
  if (!agents.is_array()) ParseFail("'agents' must be an array");
  for (const auto& a : agents) {
    Agent agent;
    agent.id = Field<int>(a, "id");
    const auto cls = ParseAgentClass(Field<std::string>(a, "class"));
    if (!cls) ParseFail("agent " + std::to_string(agent.id) + ": unknown class");
    agent.cls = *cls;
    agent.length = Field<double>(a["dims"], "length");
    agent.width = Field<double>(a["dims"], "width");
    if (!(agent.length > 0.0 && agent.width > 0.0)) {
      ParseFail("agent " + std::to_string(agent.id) + ": non-positive dims");
    }
    agent.occluder = Field<bool>(a, "occluder");
    const json& states = a["states"];
    if (!states.is_array() || states.size() != static_cast<std::size_t>(kTotalSteps)) {
      ParseFail("agent " + std::to_string(agent.id) + ": expected " +
                std::to_string(kTotalSteps) + " states");
    }
    for (const auto& s : states) {
      agent.states.push_back({{Field<double>(s, "x"), Field<double>(s, "y")},
                              {Field<double>(s, "cos"), Field<double>(s, "sin")}});
    }
    scene.agents.push_back(std::move(agent));
  }

  const json& obstacles = doc["obstacles"];
  if (!obstacles.is_array()) ParseFail("'obstacles' must be an array");
  for (const auto& o : obstacles) {
    scene.static_obstacles.push_back({{Field<double>(o, "ax"), Field<double>(o, "ay")},
                                      {Field<double>(o, "bx"), Field<double>(o, "by")}});
  }
  return scene;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

void WriteSceneFile(const std::filesystem::path& path, const Scene& scene) {
  WriteTextFile(path, SerializeScene(scene));
}

Scene ReadSceneFile(const std::filesystem::path& path) {
  try {
    return ParseScene(ReadTextFile(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) {
      throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
    }
    throw;
  }
}

std::vector<std::filesystem::path> ListSceneFiles(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() == ".json" && p.filename() != "manifest.json") files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace occmatch
