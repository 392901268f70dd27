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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socnav/geometry.hpp"
#include "socnav/rng.hpp"
#include "socnav/socialfeat.hpp"
#include "socnav/world.hpp"

namespace socnav::sim {

/// Normalized velocity command. Positive ang_vel turns clockwise.
struct Action {
  double lin_vel = 0.0;
  double ang_vel = 0.0;

  /// Both components clamped to [-1, 1]; NaN becomes 0.
  static Action clamped(double lin, double ang);
  friend bool operator==(Action, Action) = default;
};

struct PhysicsConfig {
  double dt = 0.1;             // s
  double v_max = 0.5;          // m/s
  double w_max = kPi / 2.0;    // rad/s
  double agent_radius = 0.2;   // m
  double human_radius = 0.3;   // m
  double goal_radius = 0.2;    // m
  int max_steps = 500;

  void validate() const;
  friend bool operator==(const PhysicsConfig&, const PhysicsConfig&) = default;
};

struct RewardConfig {
  double slack = -0.002;
  double collision_backward = 0.02;
  double success_bonus = 10.0;

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

struct SimConfig {
  PhysicsConfig physics;
  RewardConfig reward;
  social::FeatureParams features;

  void validate() const;
  friend bool operator==(const SimConfig& a, const SimConfig& b) {
    return a.physics == b.physics && a.reward == b.reward &&
           a.features.risk_radius == b.features.risk_radius &&
           a.features.compass_radius == b.features.compass_radius &&
           a.features.sectors == b.features.sectors;
  }
};

struct PedestrianSpec {
  Vec2 start;
  Vec2 end;
  double speed = 0.5;  // m/s
  double phase = 0.0;  // fraction of the round trip, [0, 1)

  friend bool operator==(const PedestrianSpec&, const PedestrianSpec&) = default;
};

inline constexpr double kMinPedestrianSpeed = 0.45;
inline constexpr double kMaxPedestrianSpeed = 0.5;

struct Episode {
  std::string map_id;
  Pose agent_start;
  Vec2 goal;
  std::vector<PedestrianSpec> pedestrians;
  std::uint64_t seed = 0;

  friend bool operator==(const Episode&, const Episode&) = default;
};

/// Back-and-forth walk along the start-end shortest path.
class PatrolRoute {
 public:
  /// Throws EpisodeError when the endpoints are not mutually reachable or
  /// the speed or phase is out of range.
  PatrolRoute(const PedestrianSpec& spec, const world::OccupancyGrid& grid);

  /// Pose at time t * dt. Heading follows the current direction of motion.
  Pose at(int t, double dt) const;
  double length() const { return length_; }
  const std::vector<Vec2>& polyline() const { return points_; }

 private:
  Pose along(double s, bool forward) const;

  PedestrianSpec spec_;
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
  double length_ = 0.0;
};

Pose pedestrian_position(const PedestrianSpec& spec, const world::OccupancyGrid& grid, int t,
                         double dt);

struct MotionResult {
  Pose pose;
  bool collided = false;
};

/// Rotate, then translate along the new heading. A translation whose disc
/// touches an occupied cell is dropped and reported as a collision.
MotionResult agent_step(const Pose& pose, Action action, const world::OccupancyGrid& grid,
                        const PhysicsConfig& physics);

enum class Status { Running, Success, HumanCollision, Timeout };

std::string_view to_string(Status s);
/// Throws InputError on an unknown name.
Status status_from_string(std::string_view s);

struct Termination {
  Status status = Status::Running;
  int pedestrian = -1;  // index of the colliding pedestrian
};

/// HumanCollision, then Success, then Timeout, evaluated in that order.
Termination check_termination(int t, const Pose& agent, Vec2 goal,
                              std::span<const Pose> pedestrians, const PhysicsConfig& physics);

struct RewardTerms {
  double progress = 0.0;   // -delta of the goal geodesic
  double slack = 0.0;
  double collision = 0.0;  // -beta * (I_coll + I_back)
  double success = 0.0;

  double total() const { return progress + slack + collision + success; }
  friend bool operator==(const RewardTerms&, const RewardTerms&) = default;
};

struct StepOutcome {
  double reward = 0.0;
  RewardTerms terms;
  bool coll = false;
  bool back = false;
  bool succ = false;
  bool human_coll = false;
  bool geodesic_unavailable = false;
  int human_id = -1;

  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

/// Reward for one transition. When either geodesic is missing the progress
/// term is 0 and geodesic_unavailable is set.
StepOutcome compute_reward(std::optional<double> prev_geodesic, std::optional<double> geodesic,
                           Action action, bool collided, const Termination& termination,
                           const RewardConfig& cfg);

/// Record t holds the state after step t and the action that produced it;
/// record 0 is the initial state with a zero action.
struct StepRecord {
  int t = 0;
  Pose agent;
  Action action;
  std::vector<Pose> pedestrians;
  StepOutcome outcome;
  std::optional<social::SocialFeatures> features;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct TrajectoryLog {
  SimConfig config;
  Episode episode;
  std::vector<StepRecord> records;
  Status status = Status::Running;
  int t_end = 0;

  friend bool operator==(const TrajectoryLog&, const TrajectoryLog&) = default;
};

struct StepContext {
  int t;
  const world::OccupancyGrid& grid;
  const Episode& episode;
  const SimConfig& config;
  const Pose& agent;
  std::span<const Pose> pedestrians;
  const social::SocialFeatures& features;
  Action prev_action;
  Rng& rng;
};

class Policy {
 public:
  virtual ~Policy() = default;
  /// Called once before the first action of every episode.
  virtual void begin_episode(const world::OccupancyGrid& /*grid*/, const Episode& /*episode*/,
                             const SimConfig& /*config*/) {}
  virtual Action act(const StepContext& ctx) = 0;
};

/// Validates an episode against a grid; throws EpisodeError with the reason.
void validate_episode(const world::OccupancyGrid& grid, const Episode& episode,
                      const SimConfig& config);

/// Stepwise rollout. The grid must outlive the simulation.
class Simulation {
 public:
  /// Throws EpisodeError for a malformed episode, InputError for a bad config.
  Simulation(const world::OccupancyGrid& grid, Episode episode, SimConfig config);

  bool done() const { return log_.status != Status::Running; }
  int t() const { return static_cast<int>(log_.records.size()) - 1; }
  const StepRecord& current() const { return log_.records.back(); }
  const TrajectoryLog& log() const { return log_; }
  TrajectoryLog release() { return std::move(log_); }
  Rng& rng() { return rng_; }

  StepContext context();
  /// Advances one step. Throws std::logic_error once the episode is over.
  const StepRecord& step(Action action);

  /// Cell-level geodesic to the goal from the cell containing p.
  std::optional<double> goal_geodesic(Vec2 p) const;
  const world::DistanceField& goal_field() const { return goal_field_; }
  const world::OccupancyGrid& grid() const { return *grid_; }

 private:
  std::vector<Pose> pedestrians_at(int t) const;

  const world::OccupancyGrid* grid_;
  std::vector<PatrolRoute> routes_;
  world::DistanceField goal_field_;
  Rng rng_;
  std::optional<double> geodesic_;
  TrajectoryLog log_;
};

TrajectoryLog run_episode(const world::OccupancyGrid& grid, const Episode& episode, Policy& policy,
                          const SimConfig& config);

struct GeneratorParams {
  int max_attempts = 2000;
  double min_goal_geodesic = 1.0;     // m
  double min_patrol_length = 2.0;     // m
  double min_start_clearance = 1.0;   // m from every pedestrian at t = 0
};

/// Samples start and goal uniformly over cells where the agent disc fits,
/// connected on the grid. Throws EpisodeError when no valid draw is found.
Episode generate_episode(const world::OccupancyGrid& grid, Rng& rng, int n_pedestrians,
                         const SimConfig& config = {}, const GeneratorParams& params = {},
                         std::string map_id = {});

/// Episode i uses the stream derive_seed(seed, i).
std::vector<Episode> generate_episodes(const world::OccupancyGrid& grid, int count,
                                       std::uint64_t seed, int n_pedestrians,
                                       const SimConfig& config = {},
                                       const GeneratorParams& params = {},
                                       std::string map_id = {});

// JSON interchange.
std::string episode_to_json(const Episode& episode);
Episode episode_from_json(std::string_view text);
/// Accepts a single object, an array, or {"episodes": [...]}.
std::vector<Episode> read_episodes(std::istream& in);
void write_episodes(std::ostream& out, std::span<const Episode> episodes);

std::string config_to_json(const SimConfig& config);
SimConfig config_from_json(std::string_view text);

/// JSONL: a header line (config and episode), one line per record, and a
/// summary line with the final status.
void write_log(std::ostream& out, const TrajectoryLog& log);
/// Throws InputError on malformed input or a log that breaks its invariants.
TrajectoryLog read_log(std::istream& in);
TrajectoryLog read_log_file(const std::string& path);

}  // namespace socnav::sim
