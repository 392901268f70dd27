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
#include "socnav/simcore.hpp"

namespace socnav::sim {

PatrolRoute::PatrolRoute(const PedestrianSpec& spec, const world::OccupancyGrid& grid)
    : spec_(spec) {
  if (!(spec.speed >= kMinPedestrianSpeed && spec.speed <= kMaxPedestrianSpeed))
    throw EpisodeError("pedestrian speed outside [0.45, 0.5] m/s");
  if (!(spec.phase >= 0.0 && spec.phase < 1.0)) throw EpisodeError("pedestrian phase outside [0, 1)");
  if (!grid.contains(spec.start) || !grid.contains(spec.end) ||
      grid.occupied(grid.cell_of(spec.start)) || grid.occupied(grid.cell_of(spec.end)))
    throw EpisodeError("patrol endpoint is not a free cell");
  const auto path = world::shortest_path(grid, spec.start, spec.end);
  if (!path) throw EpisodeError("patrol endpoints are not mutually reachable");

  // Endpoints replace the first and last cell centers.
  points_.push_back(spec.start);
  for (std::size_t i = 1; i + 1 < path->waypoints.size(); ++i) points_.push_back(path->waypoints[i]);
  points_.push_back(spec.end);
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i)
    cumulative_.push_back(cumulative_.back() + euclidean_distance(points_[i - 1], points_[i]));
  length_ = cumulative_.back();
}

Pose PatrolRoute::along(double s, bool forward) const {
  if (length_ <= 0.0) return Pose(spec_.start, 0.0);
  s = std::clamp(s, 0.0, length_);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t seg = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  seg = std::clamp<std::size_t>(seg, 1, points_.size() - 1);
  // Skip zero-length segments so the heading stays defined.
  while (seg + 1 < points_.size() && cumulative_[seg] == cumulative_[seg - 1]) ++seg;
  const Vec2 a = points_[seg - 1];
  const Vec2 b = points_[seg];
  const double span = cumulative_[seg] - cumulative_[seg - 1];
  const double f = span > 0.0 ? (s - cumulative_[seg - 1]) / span : 0.0;
  const Vec2 p = a + f * (b - a);
  const Vec2 dir = forward ? b - a : a - b;
  return Pose(p, std::atan2(dir.y, dir.x));
}

Pose PatrolRoute::at(int t, double dt) const {
  if (length_ <= 0.0) return Pose(spec_.start, 0.0);
  const double period = 2.0 * length_;
  double s = std::fmod(spec_.phase * period + spec_.speed * (t * dt), period);
  if (s < 0.0) s += period;
  if (s < length_) return along(s, true);
  return along(period - s, false);
}

Pose pedestrian_position(const PedestrianSpec& spec, const world::OccupancyGrid& grid, int t,
                         double dt) {
  return PatrolRoute(spec, grid).at(t, dt);
}

}  // namespace socnav::sim
