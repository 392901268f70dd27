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

#include <cmath>
#include <stdexcept>

#include "socnav/error.hpp"
#include "socnav/simcore.hpp"

namespace socnav::sim {

namespace {

bool free_point(const world::OccupancyGrid& grid, Vec2 p) {
  return grid.contains(p) && grid.free(grid.cell_of(p));
}

world::Cell goal_cell(const world::OccupancyGrid& grid, const Episode& episode, const SimConfig& config) {
  config.validate();
  validate_episode(grid, episode, config);
  return grid.cell_of(episode.goal);
}

}  // namespace

void validate_episode(const world::OccupancyGrid& grid, const Episode& episode,
                      const SimConfig& config) {
  const Vec2 start = episode.agent_start.position();
  if (!std::isfinite(start.x) || !std::isfinite(start.y) || !std::isfinite(episode.goal.x) ||
      !std::isfinite(episode.goal.y))
    throw EpisodeError("non-finite start or goal");
  if (!free_point(grid, start)) throw EpisodeError("agent start is not a free cell");
  if (!free_point(grid, episode.goal)) throw EpisodeError("goal is not a free cell");
  if (world::disc_collides(grid, start, config.physics.agent_radius))
    throw EpisodeError("agent disc overlaps an occupied cell at the start");
  if (!world::geodesic_distance(grid, start, episode.goal))
    throw EpisodeError("goal is not reachable from the start");
  for (const PedestrianSpec& p : episode.pedestrians) PatrolRoute(p, grid);
}

Simulation::Simulation(const world::OccupancyGrid& grid, Episode episode, SimConfig config)
    : grid_(&grid),
      goal_field_(grid, goal_cell(grid, episode, config)),
      rng_(episode.seed) {
  for (const PedestrianSpec& p : episode.pedestrians) routes_.emplace_back(p, grid);
  log_.config = std::move(config);
  log_.episode = std::move(episode);

  StepRecord first;
  first.t = 0;
  first.agent = log_.episode.agent_start;
  first.pedestrians = pedestrians_at(0);
  first.features = social::compute_features(first.agent, first.pedestrians, log_.config.features);
  const Termination term = check_termination(0, first.agent, log_.episode.goal, first.pedestrians,
                                             log_.config.physics);
  first.outcome.human_coll = term.status == Status::HumanCollision;
  first.outcome.succ = term.status == Status::Success;
  first.outcome.human_id = first.outcome.human_coll ? term.pedestrian : -1;
  geodesic_ = goal_geodesic(first.agent.position());
  log_.records.push_back(std::move(first));
  log_.status = term.status;
  log_.t_end = 0;
}

std::vector<Pose> Simulation::pedestrians_at(int t) const {
  std::vector<Pose> out;
  out.reserve(routes_.size());
  for (const PatrolRoute& r : routes_) out.push_back(r.at(t, log_.config.physics.dt));
  return out;
}

std::optional<double> Simulation::goal_geodesic(Vec2 p) const {
  if (!grid_->contains(p)) return std::nullopt;
  return goal_field_.meters(grid_->cell_of(p));
}

StepContext Simulation::context() {
  const StepRecord& r = log_.records.back();
  return StepContext{r.t,     *grid_, log_.episode, log_.config, r.agent, r.pedestrians,
                     *r.features, r.action, rng_};
}

const StepRecord& Simulation::step(Action action) {
  if (done()) throw std::logic_error("step() called on a finished episode");
  const Action a = Action::clamped(action.lin_vel, action.ang_vel);
  const StepRecord& prev = log_.records.back();
  const PhysicsConfig& physics = log_.config.physics;

  StepRecord next;
  next.t = prev.t + 1;
  const MotionResult motion = agent_step(prev.agent, a, *grid_, physics);
  next.agent = motion.pose;
  next.action = a;
  next.pedestrians = pedestrians_at(next.t);
  const Termination term =
      check_termination(next.t, next.agent, log_.episode.goal, next.pedestrians, physics);
  const std::optional<double> geo = goal_geodesic(next.agent.position());
  next.outcome = compute_reward(geodesic_, geo, a, motion.collided, term, log_.config.reward);
  next.features = social::compute_features(next.agent, next.pedestrians, log_.config.features);
  geodesic_ = geo;

  log_.records.push_back(std::move(next));
  log_.status = term.status;
  log_.t_end = log_.records.back().t;
  return log_.records.back();
}

TrajectoryLog run_episode(const world::OccupancyGrid& grid, const Episode& episode, Policy& policy,
                          const SimConfig& config) {
  Simulation sim(grid, episode, config);
  policy.begin_episode(grid, sim.log().episode, sim.log().config);
  while (!sim.done()) sim.step(policy.act(sim.context()));
  return sim.release();
}

}  // namespace socnav::sim
