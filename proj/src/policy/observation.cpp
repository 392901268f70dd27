// Copyright 2026 The socnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "socnav/policy/observation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "socnav/error.hpp"

namespace socnav::policy {

void ObservationConfig::validate() const {
  if (rays < 1) throw InputError("observation needs at least one ray");
  if (!(fov > 0.0 && fov <= kTwoPi)) throw InputError("observation fov must be in (0, 2pi]");
  if (!(range > 0.0) || !(goal_scale > 0.0))
    throw InputError("observation range and goal scale must be positive");
}

double ray_disc_distance(Vec2 origin, double angle, Vec2 center, double radius) {
  const Vec2 u{std::cos(angle), std::sin(angle)};
  const Vec2 oc = origin - center;
  const double c = oc.dot(oc) - radius * radius;
  if (c <= 0.0) return 0.0;
  const double b = oc.dot(u);
  const double disc = b * b - c;
  if (b > 0.0 || disc < 0.0) return std::numeric_limits<double>::infinity();
  return -b - std::sqrt(disc);
}

Vector observe(const world::OccupancyGrid& grid, const Pose& agent, Vec2 goal,
               std::span<const Pose> pedestrians, sim::Action prev_action, double human_radius,
               const ObservationConfig& cfg) {
  Vector obs(cfg.rays + NetworkConfig::kPoseInputs);
  const Vec2 p = agent.position();
  for (int j = 0; j < cfg.rays; ++j) {
    const double offset = cfg.rays == 1 ? 0.0 : cfg.fov / 2.0 - j * cfg.fov / (cfg.rays - 1);
    const double a = agent.theta() + offset;
    double depth = world::raycast(grid, p, a, cfg.range);
    for (const Pose& ped : pedestrians)
      depth = std::min(depth, ray_disc_distance(p, a, ped.position(), human_radius));
    obs[j] = std::clamp(depth, 0.0, cfg.range) / cfg.range;
  }
  const Vec2 d = goal - p;
  const double bearing = wrap_angle(std::atan2(d.y, d.x) - agent.theta());
  obs[cfg.rays] = d.norm() / cfg.goal_scale;
  obs[cfg.rays + 1] = std::sin(bearing);
  obs[cfg.rays + 2] = std::cos(bearing);
  obs[cfg.rays + 3] = prev_action.lin_vel;
  obs[cfg.rays + 4] = prev_action.ang_vel;
  return obs;
}

Vector observe(const sim::StepContext& ctx, const ObservationConfig& cfg) {
  return observe(ctx.grid, ctx.agent, ctx.episode.goal, ctx.pedestrians, ctx.prev_action,
                 ctx.config.physics.human_radius, cfg);
}

}  // namespace socnav::policy
