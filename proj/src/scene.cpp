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


#include "occmatch/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "occmatch/error.hpp"
#include "occmatch/rng.hpp"

namespace occmatch {

std::string_view AgentClassName(AgentClass cls) {
  switch (cls) {
    case AgentClass::kCar: return "car";
    case AgentClass::kPedestrian: return "pedestrian";
    case AgentClass::kBicycle: return "bicycle";
    case AgentClass::kNoClass: return "none";
  }
  return "none";
}

std::optional<AgentClass> ParseAgentClass(std::string_view name) {
  if (name == "car") return AgentClass::kCar;
  if (name == "pedestrian") return AgentClass::kPedestrian;
  if (name == "bicycle") return AgentClass::kBicycle;
  return std::nullopt;
}

void GeneratorConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (cars < 0 || pedestrians < 0 || bicycles < 0) fail("agent counts must be >= 0");
  if (buildings < 0) fail("buildings must be >= 0");
  if (!(region_half_extent > 0.0) || !std::isfinite(region_half_extent)) {
    fail("region_half_extent must be positive");
  }
  if (!(spawn_half_extent > 0.0) || spawn_half_extent >= region_half_extent) {
    fail("spawn_half_extent must lie in (0, region_half_extent)");
  }
  if (!(occlusion_level >= 0.0 && occlusion_level <= 1.0)) {
    fail("occlusion_level must lie in [0, 1], got " + std::to_string(occlusion_level));
  }
}

namespace {

constexpr double kPi = std::numbers::pi;

struct ClassProfile {
  double length;
  double width;
  double min_speed;
  double max_speed;
  double max_yaw_rate;
};

ClassProfile ProfileFor(AgentClass cls) {
  switch (cls) {
    case AgentClass::kCar: return {4.5, 1.9, 3.0, 12.0, 0.4};
    case AgentClass::kBicycle: return {1.8, 0.6, 2.0, 6.0, 0.6};
    case AgentClass::kPedestrian: return {0.6, 0.6, 0.5, 2.0, 0.8};
    case AgentClass::kNoClass: break;
  }
  throw Error(ErrorCode::kInvalidConfig, "no motion profile for NoClass");
}

enum class Motion { kStopped, kConstantVelocity, kConstantTurn };

// Closed-form state at time tau relative to the t = 0 state.
AgentState Propagate(const AgentState& s0, double speed, double yaw_rate, double tau) {
  const double theta0 = s0.heading.Angle();
  if (std::abs(yaw_rate) < 1e-12) {
    return {{s0.position.x + speed * tau * s0.heading.c,
             s0.position.y + speed * tau * s0.heading.s},
            s0.heading};
  }
  const double theta = theta0 + yaw_rate * tau;
  const double r = speed / yaw_rate;
  return {{s0.position.x + r * (std::sin(theta) - std::sin(theta0)),
           s0.position.y + r * (std::cos(theta0) - std::cos(theta))},
          HeadingVec::FromAngle(theta)};
}

struct Building {
  OrientedBox box;
  double radius;  // circumscribed
};

}  // namespace

Scene GenerateScene(const GeneratorConfig& config, std::uint64_t seed) {
  config.Validate();
  Rng rng(seed);

  Scene scene;
  scene.seed = seed;
  scene.occlusion_level = config.occlusion_level;
  scene.ego_position = {0.0, 0.0};
  scene.ego_heading = HeadingVec::FromAngle(rng.Uniform(-kPi, kPi));
  const double half = config.region_half_extent;
  scene.region = {-half, -half, half, half};

  std::vector<Building> buildings;
  for (int b = 0; b < config.buildings; ++b) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const double radius = rng.Uniform(8.0, std::max(9.0, half - 4.0));
      const double angle = rng.Uniform(-kPi, kPi);
      OrientedBox box{{radius * std::cos(angle), radius * std::sin(angle)},
                      HeadingVec::FromAngle(rng.Uniform(-kPi, kPi)),
                      rng.Uniform(3.0, 8.0), rng.Uniform(3.0, 8.0)};
      const double circ = 0.5 * std::hypot(box.length, box.width);
      if (!scene.region.Contains(box.center) || radius - circ < 4.0) continue;
      bool clear = true;
      for (const auto& other : buildings) {
        if (Distance(other.box.center, box.center) < other.radius + circ + 1.0) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      buildings.push_back({box, circ});
      placed = true;
    }
    if (!placed) {
      throw Error(ErrorCode::kInvalidConfig,
                  "could not place building " + std::to_string(b));
    }
  }
  for (const auto& b : buildings) {
    for (const auto& e : b.box.Edges()) scene.static_obstacles.push_back(e);
  }

  std::vector<AgentClass> classes;
  classes.insert(classes.end(), config.cars, AgentClass::kCar);
  classes.insert(classes.end(), config.bicycles, AgentClass::kBicycle);
  classes.insert(classes.end(), config.pedestrians, AgentClass::kPedestrian);

  const double spawn = config.spawn_half_extent;
  const Bounds history_bounds{-half + 1.0, -half + 1.0, half - 1.0, half - 1.0};

  for (std::size_t i = 0; i < classes.size(); ++i) {
    const AgentClass cls = classes[i];
    const ClassProfile profile = ProfileFor(cls);
    bool placed = false;
    for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
      Agent agent;
      agent.id = static_cast<int>(i);
      agent.cls = cls;
      agent.length = profile.length * rng.Uniform(0.9, 1.1);
      agent.width = profile.width * rng.Uniform(0.9, 1.1);

      const AgentState s0{{rng.Uniform(-spawn, spawn), rng.Uniform(-spawn, spawn)},
                          HeadingVec::FromAngle(rng.Uniform(-kPi, kPi))};
      const double u = rng.Uniform();
      const Motion motion = u < 0.2   ? Motion::kStopped
                            : u < 0.6 ? Motion::kConstantVelocity
                                      : Motion::kConstantTurn;
      double speed = rng.Uniform(profile.min_speed, profile.max_speed);
      double yaw_rate = rng.Uniform(0.25, 1.0) * profile.max_yaw_rate;
      if (rng.Bernoulli(0.5)) yaw_rate = -yaw_rate;
      if (motion == Motion::kStopped) speed = 0.0;
      if (motion != Motion::kConstantTurn) yaw_rate = 0.0;

      agent.states.reserve(kTotalSteps);
      for (int step = 0; step < kTotalSteps; ++step) {
        agent.states.push_back(Propagate(s0, speed, yaw_rate, StepTime(step)));
      }

      const double reach = 0.5 * std::hypot(agent.length, agent.width);
      bool ok = true;
      for (int step = 0; step < kHistorySteps && ok; ++step) {
        const Point2 p = agent.states[step].position;
        if (!history_bounds.Contains(p) || Distance(p, scene.ego_position) < reach + 3.0) {
          ok = false;
          break;
        }
        for (const auto& b : buildings) {
          if (Distance(p, b.box.center) < b.radius + reach + 0.5) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) continue;
      // Footprints at t = 0 keep clear of one another, which also puts every
      // agent center in its own grid cell.
      for (const auto& other : scene.agents) {
        const double other_reach = 0.5 * std::hypot(other.length, other.width);
        if (Distance(other.states[kPredictionStep].position, s0.position) <
            std::max(reach + other_reach + 0.3, 2.5)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      scene.agents.push_back(std::move(agent));
      placed = true;
    }
    if (!placed) {
      throw Error(ErrorCode::kInvalidConfig,
                  "could not place agent " + std::to_string(i) + " without overlap");
    }
  }

  for (auto& agent : scene.agents) {
    agent.occluder = rng.Bernoulli(config.occlusion_level);
  }
  return scene;
}

Grid Grid::ForRegion(const Bounds& region, double resolution) {
  Grid g;
  g.region = region;
  g.resolution = resolution;
  g.nx = static_cast<int>(std::lround((region.max_x - region.min_x) / resolution));
  g.ny = static_cast<int>(std::lround((region.max_y - region.min_y) / resolution));
  return g;
}

std::optional<int> Grid::CellOf(Point2 p) const {
  const double fx = (p.x - region.min_x) / resolution;
  const double fy = (p.y - region.min_y) / resolution;
  if (!(fx >= 0.0 && fy >= 0.0)) return std::nullopt;
  int ix = static_cast<int>(std::floor(fx));
  int iy = static_cast<int>(std::floor(fy));
  // The closing boundary belongs to the last cell.
  if (ix == nx && fx <= nx) ix = nx - 1;
  if (iy == ny && fy <= ny) iy = ny - 1;
  if (ix >= nx || iy >= ny) return std::nullopt;
  return Index(ix, iy);
}

bool VisibilityMask::PointVisible(int step, Point2 p) const {
  const auto cell = grid.CellOf(p);
  return cell && CellVisible(step, *cell);
}

std::optional<int> VisibilityMask::LastObservedStep(int agent_index) const {
  for (int step = kHistorySteps - 1; step >= 0; --step) {
    if (AgentObserved(agent_index, step)) return step;
  }
  return std::nullopt;
}

std::vector<OccluderEdge> OccludersAt(const Scene& scene, int step) {
  std::vector<OccluderEdge> edges;
  for (const auto& s : scene.static_obstacles) edges.push_back({s, -1});
  for (std::size_t i = 0; i < scene.agents.size(); ++i) {
    const auto& agent = scene.agents[i];
    if (!agent.occluder) continue;
    for (const auto& e : agent.FootprintAt(step).Edges()) {
      edges.push_back({e, static_cast<int>(i)});
    }
  }
  return edges;
}

namespace {

// Walks the grid cells pierced by a ray (Amanatides-Woo), calling
// visit(cell, t_enter) in order until visit returns false or the ray leaves.
template <typename Visit>
void TraverseRay(const Grid& grid, Point2 origin, HeadingVec dir, Visit&& visit) {
  const double res = grid.resolution;
  const double fx = (origin.x - grid.region.min_x) / res;
  const double fy = (origin.y - grid.region.min_y) / res;
  int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, grid.nx - 1);
  int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, grid.ny - 1);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  const int step_x = dir.c > 0.0 ? 1 : (dir.c < 0.0 ? -1 : 0);
  const int step_y = dir.s > 0.0 ? 1 : (dir.s < 0.0 ? -1 : 0);
  const double delta_x = step_x != 0 ? res / std::abs(dir.c) : kInf;
  const double delta_y = step_y != 0 ? res / std::abs(dir.s) : kInf;
  double next_x = kInf;
  double next_y = kInf;
  if (step_x != 0) {
    const double boundary = grid.region.min_x + (ix + (step_x > 0 ? 1 : 0)) * res;
    next_x = std::max(0.0, (boundary - origin.x) / dir.c);
  }
  if (step_y != 0) {
    const double boundary = grid.region.min_y + (iy + (step_y > 0 ? 1 : 0)) * res;
    next_y = std::max(0.0, (boundary - origin.y) / dir.s);
  }

  double t_enter = 0.0;
  while (true) {
    if (!visit(grid.Index(ix, iy), t_enter)) return;
    if (next_x < next_y) {
      t_enter = next_x;
      next_x += delta_x;
      ix += step_x;
    } else {
      t_enter = next_y;
      next_y += delta_y;
      iy += step_y;
    }
    if (ix < 0 || iy < 0 || ix >= grid.nx || iy >= grid.ny) return;
  }
}

}  // namespace

VisibilityMask ComputeVisibility(const Scene& scene, int ray_count) {
  if (ray_count < 36) {
    throw Error(ErrorCode::kInvalidConfig, "ray_count must be >= 36");
  }
  VisibilityMask mask;
  mask.grid = Grid::ForRegion(scene.region);
  const Grid& grid = mask.grid;
  mask.cell_visible.assign(kHistorySteps, std::vector<std::uint8_t>(grid.CellCount(), 0));
  mask.agent_observed.assign(scene.agents.size(),
                             std::vector<std::uint8_t>(kHistorySteps, 0));
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Point2 origin = scene.ego_position;

  for (int step = 0; step < kHistorySteps; ++step) {
    const auto edges = OccludersAt(scene, step);
    auto& visible = mask.cell_visible[step];

    for (int k = 0; k < ray_count; ++k) {
      const HeadingVec dir = HeadingVec::FromAngle(2.0 * std::numbers::pi * k / ray_count);
      double t_hit = kInf;
      int owner = -1;
      for (const auto& e : edges) {
        const auto t = RaySegmentIntersect(origin, dir, e.segment);
        if (t && *t < t_hit) {
          t_hit = *t;
          owner = e.owner;
        }
      }

      // Past the first hit the ray may still reveal the struck footprint.
      double t_exit = t_hit;
      std::optional<OrientedBox> struck;
      std::optional<int> struck_center_cell;
      if (owner >= 0) {
        struck = scene.agents[owner].FootprintAt(step);
        for (const auto& e : struck->Edges()) {
          const auto t = RaySegmentIntersect(origin, dir, e);
          if (t) t_exit = std::max(t_exit, *t);
        }
        struck_center_cell = grid.CellOf(struck->center);
      }

      TraverseRay(grid, origin, dir, [&](int cell, double t_enter) {
        if (t_enter < t_hit) {
          visible[cell] = 1;
          return true;
        }
        if (!struck || t_enter >= t_exit) return false;
        if (struck->Contains(grid.CellCenter(cell)) || cell == struck_center_cell) {
          visible[cell] = 1;
        }
        return true;
      });
    }

    for (std::size_t i = 0; i < scene.agents.size(); ++i) {
      mask.agent_observed[i][step] =
          mask.PointVisible(step, scene.agents[i].states[step].position) ? 1 : 0;
    }
  }
  return mask;
}

AnchorSet BuildAnchors(const Scene& scene, const VisibilityMask& mask) {
  AnchorSet set;
  const Grid& grid = mask.grid;
  for (std::size_t i = 0; i < scene.agents.size(); ++i) {
    const auto last = mask.LastObservedStep(static_cast<int>(i));
    if (!last) continue;
    const Point2 p = scene.agents[i].states[*last].position;
    bool duplicate = false;
    for (const auto& a : set.anchors) {
      if (Distance(a.position, p) <= 1e-6) duplicate = true;
    }
    if (duplicate) continue;
    set.anchors.push_back(
        {p, AnchorSource::kObservedAgent, static_cast<int>(i), grid.CellOf(p).value_or(-1)});
  }
  const std::size_t agent_anchor_count = set.anchors.size();

  const auto& visible_now = mask.cell_visible[kPredictionStep];
  for (int cell = 0; cell < grid.CellCount(); ++cell) {
    if (visible_now[cell]) continue;
    const Point2 center = grid.CellCenter(cell);
    bool duplicate = false;
    for (std::size_t j = 0; j < agent_anchor_count; ++j) {
      if (Distance(set.anchors[j].position, center) <= 1e-6) duplicate = true;
    }
    if (duplicate) continue;
    set.anchors.push_back({center, AnchorSource::kOccludedGrid, -1, cell});
  }
  return set;
}

std::vector<GroundTruth> GroundTruthAtPredictionTime(const Scene& scene,
                                                     const VisibilityMask& mask) {
  std::vector<GroundTruth> gts;
  gts.reserve(scene.agents.size());
  for (std::size_t i = 0; i < scene.agents.size(); ++i) {
    const auto& agent = scene.agents[i];
    GroundTruth gt;
    gt.agent_index = static_cast<int>(i);
    gt.agent_id = agent.id;
    gt.cls = agent.cls;
    gt.position = agent.states[kPredictionStep].position;
    gt.heading = agent.states[kPredictionStep].heading;
    gt.occluded = !mask.AgentObserved(static_cast<int>(i), kPredictionStep);
    gt.future.reserve(kFutureSteps);
    for (int step = kHistorySteps; step < kTotalSteps; ++step) {
      gt.future.push_back(agent.states[step].position);
    }
    gts.push_back(std::move(gt));
  }
  return gts;
}

}  // namespace occmatch
