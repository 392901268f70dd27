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
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "socnav/policy/network.hpp"
#include "socnav/policy/observation.hpp"
#include "socnav/simcore.hpp"
#include "socnav/world.hpp"

namespace socnav::policy {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Vector m;
  Vector v;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update in place.
void adam_step(Vector& params, const Vector& grad, AdamState& state, const AdamConfig& cfg);

/// Rescales grad to at most max_norm; returns the norm before clipping.
double clip_gradient(Vector& grad, double max_norm);

struct TrainerConfig {
  int envs = 8;
  int rollout = 16;  // n-step horizon
  double gamma = 0.99;
  double grad_clip = 0.5;
  int pedestrians = 3;
  std::uint64_t seed = 1;
  AdamConfig adam;
  LossWeights weights;

  void validate() const;
};

struct TrainingRow {
  int update = 0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double aux_risk = 0.0;
  double aux_compass = 0.0;
  std::optional<double> mean_return;  // episodes finished during the update
};

void write_training_header(std::ostream& out);
void write_training_row(std::ostream& out, const TrainingRow& row);

/// Synchronous n-step advantage actor-critic over parallel environments.
class Trainer {
 public:
  /// Throws InputError on an empty map list or an invalid configuration.
  Trainer(Network& net, std::vector<world::OccupancyGrid> maps, sim::SimConfig sim,
          TrainerConfig cfg, ObservationConfig obs = {});
  ~Trainer();

  /// Collects one rollout chunk per environment and applies one update.
  /// Throws TrainingDiverged on a non-finite loss or gradient.
  TrainingRow update();

  int updates_done() const { return updates_; }
  const AdamState& adam() const { return adam_; }
  /// Restores optimizer progress; environments start fresh episodes.
  void restore(int updates, AdamState adam);

 private:
  struct Env;
  void reset_env(Env& env);

  Network& net_;
  std::vector<world::OccupancyGrid> maps_;
  sim::SimConfig sim_;
  TrainerConfig cfg_;
  ObservationConfig obs_;
  AdamState adam_;
  int updates_ = 0;
  std::vector<std::unique_ptr<Env>> envs_;
};

/// Network, optimizer and trainer progress.
struct Checkpoint {
  NetworkConfig network;
  ObservationConfig observation;
  Vector params;
  AdamState adam;
  int updates = 0;
  std::uint64_t seed = 0;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
/// Checks the shape manifest against the network configuration; throws
/// InputError on any mismatch.
Checkpoint checkpoint_from_json(std::string_view text);
/// Writes to a temporary file and renames it into place.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);
Network network_from(const Checkpoint& ckpt);

std::string network_config_to_json(const NetworkConfig& cfg);
NetworkConfig network_config_from_json(std::string_view text);

}  // namespace socnav::policy
