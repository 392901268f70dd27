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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "socnav/simcore.hpp"
#include "socnav/world.hpp"

namespace socnav::navmetrics {

struct EpisodeMetrics {
  bool success = false;
  bool human_collision = false;
  bool timeout = false;
  double spl = 0.0;
  double path_length = 0.0;      // m
  double shortest_length = 0.0;  // m, shortcut grid path start to goal
  double grid_geodesic = 0.0;    // m, 8-connected cell geodesic
  int steps = 0;
};

/// Throws InputError when the goal is unreachable from the start.
EpisodeMetrics episode_metrics(const sim::TrajectoryLog& log, const world::OccupancyGrid& grid);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

struct Summary {
  MeanStd success_pct;
  MeanStd spl;      // ratio in [0, 1]
  MeanStd spl_pct;  // spl * 100
  MeanStd h_collision_pct;
  MeanStd timeout_pct;
  int n_runs = 0;
  int n_episodes = 0;
};

MeanStd mean_std(std::span<const double> values);

/// Each run's value is the mean over its episodes (percent for booleans);
/// the summary is the mean and population std over runs. Empty runs are
/// rejected with InputError.
Summary aggregate(std::span<const std::vector<EpisodeMetrics>> runs);

std::string summary_to_json(const Summary& s);
/// One row per episode: run,episode,success,human_collision,timeout,spl,path_length,shortest_length,steps.
void write_episode_csv(std::ostream& out, std::span<const std::vector<EpisodeMetrics>> runs);

}  // namespace socnav::navmetrics
