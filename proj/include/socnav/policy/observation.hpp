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

#pragma once

#include <span>

#include "socnav/geometry.hpp"
#include "socnav/policy/network.hpp"
#include "socnav/simcore.hpp"
#include "socnav/world.hpp"

namespace socnav::policy {

/// Depth rays fan out across the field of view from left to right; depths
/// and the goal distance are normalized.
struct ObservationConfig {
  int rays = 24;
  double fov = kPi / 2.0;
  double range = 5.0;       // m
  double goal_scale = 10.0;  // m

  void validate() const;
  friend bool operator==(const ObservationConfig&, const ObservationConfig&) = default;
};

/// Distance from origin along the heading to the first hit on a disc; +inf on a miss.
double ray_disc_distance(Vec2 origin, double angle, Vec2 center, double radius);

/// rays depths in [0, 1], goal distance / goal_scale, sin and cos of the goal
/// bearing (counterclockwise from the heading), previous lin and ang command.
Vector observe(const world::OccupancyGrid& grid, const Pose& agent, Vec2 goal,
               std::span<const Pose> pedestrians, sim::Action prev_action, double human_radius,
               const ObservationConfig& cfg);

Vector observe(const sim::StepContext& ctx, const ObservationConfig& cfg);

}  // namespace socnav::policy
