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

#include <algorithm>
#include <cmath>
#include <string>

#include "socnav/error.hpp"
#include "socnav/simcore.hpp"

namespace socnav::sim {

namespace {

double clamp_unit(double v) { return std::isnan(v) ? 0.0 : std::clamp(v, -1.0, 1.0); }

}  // namespace

Action Action::clamped(double lin, double ang) { return {clamp_unit(lin), clamp_unit(ang)}; }

void PhysicsConfig::validate() const {
  if (!(dt > 0.0)) throw InputError("dt must be positive");
  if (!(v_max > 0.0) || !(w_max > 0.0)) throw InputError("velocity caps must be positive");
  if (!(agent_radius > 0.0) || !(human_radius > 0.0)) throw InputError("radii must be positive");
  if (!(goal_radius > 0.0)) throw InputError("goal radius must be positive");
  if (max_steps < 1) throw InputError("max_steps must be at least 1");
}

void SimConfig::validate() const {
  physics.validate();
  features.validate();
}

MotionResult agent_step(const Pose& pose, Action action, const world::OccupancyGrid& grid,
                        const PhysicsConfig& physics) {
  const Action a = Action::clamped(action.lin_vel, action.ang_vel);
  const double theta = wrap_angle(pose.theta() - a.ang_vel * physics.w_max * physics.dt);
  const double step = a.lin_vel * physics.v_max * physics.dt;
  if (step == 0.0) return {Pose(pose.position(), theta), false};
  const Vec2 candidate{pose.x() + step * std::cos(theta), pose.y() + step * std::sin(theta)};
  if (world::disc_collides(grid, candidate, physics.agent_radius))
    return {Pose(pose.position(), theta), true};
  return {Pose(candidate, theta), false};
}

Termination check_termination(int t, const Pose& agent, Vec2 goal,
                              std::span<const Pose> pedestrians, const PhysicsConfig& physics) {
  const double contact = physics.agent_radius + physics.human_radius;
  for (std::size_t i = 0; i < pedestrians.size(); ++i) {
    if (euclidean_distance(agent.position(), pedestrians[i].position()) < contact)
      return {Status::HumanCollision, static_cast<int>(i)};
  }
  if (euclidean_distance(agent.position(), goal) < physics.goal_radius) return {Status::Success};
  if (t >= physics.max_steps) return {Status::Timeout};
  return {Status::Running};
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Running: return "Running";
    case Status::Success: return "Success";
    case Status::HumanCollision: return "HumanCollision";
    case Status::Timeout: return "Timeout";
  }
  return "Running";
}

Status status_from_string(std::string_view s) {
  for (Status v : {Status::Running, Status::Success, Status::HumanCollision, Status::Timeout})
    if (to_string(v) == s) return v;
  throw InputError("unknown status '" + std::string(s) + "'");
}

}  // namespace socnav::sim
