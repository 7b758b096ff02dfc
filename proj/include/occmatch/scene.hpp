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


// Synthetic traffic scenes, ray-cast visibility and anchor construction.
//
// Time indexing: every agent carries kHistorySteps + kFutureSteps states at
// 0.1 s spacing. Index kPredictionStep is t = 0 (the last history step), so
// history spans t = -0.9 s .. 0 s and the future t = 0.1 s .. 4.0 s.

#ifndef OCCMATCH_SCENE_HPP_
#define OCCMATCH_SCENE_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "occmatch/geom.hpp"

namespace occmatch {

inline constexpr int kHistorySteps = 10;
inline constexpr int kFutureSteps = 40;
inline constexpr int kTotalSteps = kHistorySteps + kFutureSteps;
inline constexpr int kPredictionStep = kHistorySteps - 1;
inline constexpr double kStepSeconds = 0.1;
inline constexpr double kGridResolution = 1.5;
inline constexpr int kDefaultRayCount = 720;

// Order matches the class head output layout.
enum class AgentClass { kCar = 0, kPedestrian = 1, kBicycle = 2, kNoClass = 3 };
inline constexpr int kNumClasses = 4;

std::string_view AgentClassName(AgentClass cls);
std::optional<AgentClass> ParseAgentClass(std::string_view name);

inline double StepTime(int step) {
  return static_cast<double>(step - kPredictionStep) / 10.0;
}

struct AgentState {
  Point2 position;
  HeadingVec heading;
};

struct Agent {
  int id = 0;
  AgentClass cls = AgentClass::kCar;
  double length = 0.0;
  double width = 0.0;
  bool occluder = false;
  std::vector<AgentState> states;  // kTotalSteps entries

  OrientedBox FootprintAt(int step) const {
    return {states[step].position, states[step].heading, length, width};
  }
};

struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool Contains(Point2 p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

struct Scene {
  Point2 ego_position;
  HeadingVec ego_heading;
  std::vector<Agent> agents;
  std::vector<Segment2> static_obstacles;
  Bounds region;
  double occlusion_level = 0.0;
  std::uint64_t seed = 0;
};

struct GeneratorConfig {
  int cars = 6;
  int pedestrians = 3;
  int bicycles = 2;
  int buildings = 4;
  double region_half_extent = 30.0;
  // t = 0 agent centers are drawn from [-spawn, spawn]^2 around the ego.
  double spawn_half_extent = 18.0;
  double occlusion_level = 0.5;

  void Validate() const;
};

// Deterministic for fixed (config, seed). Throws Error(kInvalidConfig).
Scene GenerateScene(const GeneratorConfig& config, std::uint64_t seed);

// Axis-aligned cell grid over the scene region.
struct Grid {
  Bounds region;
  double resolution = kGridResolution;
  int nx = 0;
  int ny = 0;

  static Grid ForRegion(const Bounds& region, double resolution = kGridResolution);
  int CellCount() const { return nx * ny; }
  int Index(int ix, int iy) const { return iy * nx + ix; }
  Point2 CellCenter(int ix, int iy) const {
    return {region.min_x + (ix + 0.5) * resolution,
            region.min_y + (iy + 0.5) * resolution};
  }
  Point2 CellCenter(int index) const { return CellCenter(index % nx, index / nx); }
  // Cell containing p, or nullopt outside the grid.
  std::optional<int> CellOf(Point2 p) const;
};

struct VisibilityMask {
  Grid grid;
  // [history step][cell], 1 = visible.
  std::vector<std::vector<std::uint8_t>> cell_visible;
  // [agent index][history step], 1 = observed.
  std::vector<std::vector<std::uint8_t>> agent_observed;

  bool CellVisible(int step, int cell) const { return cell_visible[step][cell] != 0; }
  // Points outside the grid count as not visible.
  bool PointVisible(int step, Point2 p) const;
  bool AgentObserved(int agent_index, int step) const {
    return agent_observed[agent_index][step] != 0;
  }
  // Last history step at which the agent was observed.
  std::optional<int> LastObservedStep(int agent_index) const;
};

// Casts ray_count rays (>= 36) uniformly over [0, 2pi) from the ego at every
// history step. A cell is visible when some ray enters it before striking an
// occluder; a ray that strikes an agent footprint also reveals the cells
// covered by that footprint.
VisibilityMask ComputeVisibility(const Scene& scene, int ray_count = kDefaultRayCount);

// Occluder segments active at a history step, with the owning agent index
// (-1 for static obstacles).
struct OccluderEdge {
  Segment2 segment;
  int owner = -1;
};
std::vector<OccluderEdge> OccludersAt(const Scene& scene, int step);

enum class AnchorSource { kObservedAgent, kOccludedGrid };

struct Anchor {
  Point2 position;
  AnchorSource source = AnchorSource::kOccludedGrid;
  int agent_index = -1;  // set for kObservedAgent
  int cell = -1;         // grid cell containing position, -1 outside
};

struct AnchorSet {
  std::vector<Anchor> anchors;
  std::size_t size() const { return anchors.size(); }
};

// Observed-agent anchors (one per agent ever observed, at its last observed
// position, in agent order) followed by one anchor per cell occluded at t = 0
// in row-major order. Grid anchors within 1e-6 m of an agent anchor are dropped.
AnchorSet BuildAnchors(const Scene& scene, const VisibilityMask& mask);

struct GroundTruth {
  int agent_index = 0;
  int agent_id = 0;
  AgentClass cls = AgentClass::kCar;
  Point2 position;
  HeadingVec heading;
  bool occluded = false;
  std::vector<Point2> future;  // kFutureSteps points, t = 0.1 s .. 4.0 s
};

std::vector<GroundTruth> GroundTruthAtPredictionTime(const Scene& scene,
                                                     const VisibilityMask& mask);

}  // namespace occmatch

#endif  // OCCMATCH_SCENE_HPP_
