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

#include "socnav/error.hpp"
#include "socnav/policy/agents.hpp"

namespace socnav::policy {
namespace {

bool visible(const world::OccupancyGrid& grid, Vec2 a, Vec2 b) {
  if (!grid.contains(a) || !grid.contains(b)) return false;
  return world::line_of_sight(grid, a, b);
}

std::optional<world::Cell> start_cell(const world::OccupancyGrid& grid,
                                      const world::DistanceField& field, Vec2 p) {
  const world::Cell c = grid.cell_of(p);
  if (field.reached(c)) return c;
  try {
    const world::Cell s = world::snap_to_free(grid, p);
    if (field.reached(s)) return s;
  } catch (const InputError&) {
  }
  return std::nullopt;
}

}  // namespace

void GreedyPolicy::begin_episode(const world::OccupancyGrid& grid, const sim::Episode& episode,
                                 const sim::SimConfig& config) {
  raw_grid_ = &grid;
  goal_ = episode.goal;
  w_step_ = config.physics.w_max * config.physics.dt;
  const double r = config.physics.agent_radius;
  const double center_clearance = r + grid.resolution() / std::sqrt(2.0);
  center_grid_ = world::inflate(grid, center_clearance);
  plan_grids_.clear();
  plan_fields_.clear();
  plan_grids_.reserve(4);
  for (double c : {center_clearance + params_.clearance_margin, center_clearance, r, 0.0})
    plan_grids_.push_back(c > 0.0 ? world::inflate(grid, c) : grid);
  for (const world::OccupancyGrid& g : plan_grids_) {
    try {
      plan_fields_.emplace_back(std::in_place, g, world::snap_to_free(g, goal_));
    } catch (const InputError&) {
      plan_fields_.emplace_back(std::nullopt);
    }
  }
}

Vec2 GreedyPolicy::target(const Pose& agent) const {
  const Vec2 p = agent.position();
  if (visible(center_grid_, p, goal_)) return goal_;
  const world::OccupancyGrid* grid = nullptr;
  const world::DistanceField* field = nullptr;
  std::optional<world::Cell> c;
  for (std::size_t i = 0; i < plan_grids_.size() && !c; ++i) {
    if (!plan_fields_[i]) continue;
    grid = &plan_grids_[i];
    field = &*plan_fields_[i];
    c = start_cell(*grid, *field, p);
  }
  if (!c) return goal_;

  std::vector<Vec2> pts{grid->center(*c)};
  int idx = grid->index(*c);
  double along = 0.0;
  while (along < params_.lookahead) {
    const int next = field->parent(idx);
    if (next == world::DistanceField::kNoParent) {
      pts.push_back(goal_);
      break;
    }
    const Vec2 q = grid->center(grid->cell_at(next));
    along += euclidean_distance(pts.back(), q);
    pts.push_back(q);
    idx = next;
  }
  for (std::size_t i = pts.size(); i-- > 1;)
    if (visible(center_grid_, p, pts[i])) return pts[i];
  return pts.size() > 1 ? pts[1] : pts[0];
}

sim::Action GreedyPolicy::pursue(const sim::StepContext& ctx) const {
  if (!raw_grid_) throw std::logic_error("GreedyPolicy: begin_episode was not called");
  const Vec2 p = ctx.agent.position();
  const Vec2 t = target(ctx.agent);
  const Vec2 d = t - p;
  if (d.norm() < 1e-9) return {};
  const double err = wrap_angle(std::atan2(d.y, d.x) - ctx.agent.theta());
  const double ang = -err / w_step_;
  const double lin = std::abs(err) > params_.turn_in_place ? 0.0 : std::cos(err);
  return sim::Action::clamped(lin, ang);
}

bool forward_sector(int sector, int sectors, double halfwidth) {
  const double center = (sector + 0.5) * kTwoPi / sectors;
  return center < halfwidth || center > kTwoPi - halfwidth;
}

namespace {

bool right_side(int sector, int sectors) { return (sector + 0.5) * kTwoPi / sectors < kPi; }

}  // namespace

sim::Action SocialPolicy::act(const sim::StepContext& ctx) {
  const sim::Action a = pursue(ctx);
  const social::SocialFeatures& f = ctx.features;
  const int k = static_cast<int>(f.compass.size());
  if (f.risk > social_.stop_risk) {
    int nearest = 0;
    for (int j = 1; j < k; ++j)
      if (f.compass[j] > f.compass[nearest]) nearest = j;
    // Negative commands turn counterclockwise (left).
    const double scan = right_side(nearest, k) ? -social_.scan_rate : social_.scan_rate;
    return sim::Action::clamped(0.0, scan);
  }
  double lin = a.lin_vel * (1.0 - f.risk);
  double ang = a.ang_vel;
  int best = -1;
  for (int j = 0; j < k; ++j)
    if (forward_sector(j, k, social_.forward_halfwidth) && (best < 0 || f.compass[j] > f.compass[best]))
      best = j;
  if (best >= 0 && f.compass[best] > social_.steer_threshold) {
    ang += (right_side(best, k) ? -1.0 : 1.0) * social_.steer_gain;
    lin = 1.0 - f.risk;
  }
  return sim::Action::clamped(lin, ang);
}

}  // namespace socnav::policy
