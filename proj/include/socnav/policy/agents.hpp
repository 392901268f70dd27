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

#include <optional>
#include <vector>

#include "socnav/policy/network.hpp"
#include "socnav/policy/observation.hpp"
#include "socnav/simcore.hpp"
#include "socnav/world.hpp"

namespace socnav::policy {

/// Sample from the network's Normal(mu, sigma), then clamp.
class LearnedPolicy : public sim::Policy {
 public:
  /// Throws InputError when the observation and network ray counts differ.
  LearnedPolicy(const Network& net, ObservationConfig obs = {}, bool deterministic = false);

  void begin_episode(const world::OccupancyGrid& grid, const sim::Episode& episode,
                     const sim::SimConfig& config) override;
  sim::Action act(const sim::StepContext& ctx) override;

  const std::vector<Vector>& beliefs() const { return beliefs_; }
  /// Unclamped sample of the last act() call.
  Eigen::Vector2d last_raw() const { return raw_; }

 private:
  const Network* net_;
  ObservationConfig obs_;
  bool deterministic_;
  std::vector<Vector> beliefs_;
  Eigen::Vector2d raw_ = Eigen::Vector2d::Zero();
};

/// Draw u = mu + sigma * eps with eps ~ N(0, I).
Eigen::Vector2d sample_action(const Eigen::Vector2d& mu, const Eigen::Vector2d& sigma, Rng& rng);

struct GreedyParams {
  double clearance_margin = 0.05;  // m beyond the agent radius used for planning
  double lookahead = 0.6;          // m along the path
  double turn_in_place = kPi / 4;  // heading error above which lin = 0
};

/// Pure pursuit along the shortest path to the goal on an inflated grid.
class GreedyPolicy : public sim::Policy {
 public:
  explicit GreedyPolicy(GreedyParams params = {}) : params_(params) {}
  // The distance fields point into the member grids.
  GreedyPolicy(const GreedyPolicy&) = delete;
  GreedyPolicy& operator=(const GreedyPolicy&) = delete;

  void begin_episode(const world::OccupancyGrid& grid, const sim::Episode& episode,
                     const sim::SimConfig& config) override;
  sim::Action act(const sim::StepContext& ctx) override { return pursue(ctx); }

  /// Point the controller is steering at.
  Vec2 target(const Pose& agent) const;

 protected:
  sim::Action pursue(const sim::StepContext& ctx) const;

 private:
  GreedyParams params_;
  Vec2 goal_;
  double w_step_ = 0.0;  // rad per unit ang command per step
  // Planning grids from the widest clearance down to the bare agent radius,
  // each with a field rooted at the goal.
  std::vector<world::OccupancyGrid> plan_grids_;
  std::vector<std::optional<world::DistanceField>> plan_fields_;
  world::OccupancyGrid center_grid_;  // free cells keep the whole disc clear
  const world::OccupancyGrid* raw_grid_ = nullptr;
};

struct SocialParams {
  double stop_risk = 0.7;
  double steer_threshold = 0.5;
  double steer_gain = 2.0;            // added to the ang command, away from the person
  double scan_rate = 0.3;             // |ang| while stopped, turning away from the nearest sector
  double forward_halfwidth = 0.75 * kPi;  // sectors centered within this of the heading
};

/// Greedy pursuit modulated by the social features. lin is scaled by
/// (1 - risk); above stop_risk the agent stops and scans; when a forward
/// sector exceeds steer_threshold the agent veers away from the strongest
/// one and keeps moving at the scaled nominal speed.
class SocialPolicy : public GreedyPolicy {
 public:
  explicit SocialPolicy(SocialParams social = {}, GreedyParams greedy = {})
      : GreedyPolicy(greedy), social_(social) {}

  sim::Action act(const sim::StepContext& ctx) override;

 private:
  SocialParams social_;
};

/// Whether the center of a clockwise sector lies within halfwidth of the heading.
bool forward_sector(int sector, int sectors, double halfwidth);

}  // namespace socnav::policy
