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
#include <random>
#include <utility>

#include "socnav/error.hpp"
#include "socnav/simcore.hpp"

namespace socnav::sim {

namespace {

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

// Cells where the agent disc fits, grouped by connected component.
class StartRegions {
 public:
  StartRegions(const world::OccupancyGrid& grid, double agent_radius)
      : clearance_(world::inflate(grid, agent_radius)) {
    std::vector<int> label(clearance_.cell_count(), -1);
    for (int i = 0; i < static_cast<int>(clearance_.cell_count()); ++i) {
      if (clearance_.cells()[static_cast<std::size_t>(i)] != 0 || label[static_cast<std::size_t>(i)] >= 0)
        continue;
      const world::DistanceField field(clearance_, clearance_.cell_at(i));
      std::vector<world::Cell> members;
      for (int j = i; j < static_cast<int>(clearance_.cell_count()); ++j) {
        const world::Cell c = clearance_.cell_at(j);
        if (field.reached(c)) {
          label[static_cast<std::size_t>(j)] = static_cast<int>(components_.size());
          members.push_back(c);
        }
      }
      for (std::size_t k = 0; k < members.size(); ++k) {
        cells_.push_back(members[k]);
        owner_.push_back(components_.size());
      }
      components_.push_back(std::move(members));
    }
  }

  bool empty() const { return cells_.empty(); }
  /// Uniform over all cells; returns the cell and its component.
  std::pair<world::Cell, const std::vector<world::Cell>*> draw(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> d(0, cells_.size() - 1);
    const std::size_t k = d(rng);
    return {cells_[k], &components_[owner_[k]]};
  }

 private:
  world::OccupancyGrid clearance_;
  std::vector<std::vector<world::Cell>> components_;
  std::vector<world::Cell> cells_;
  std::vector<std::size_t> owner_;
};

Episode sample(const world::OccupancyGrid& grid, const StartRegions& regions, Rng& rng,
               int n_pedestrians, const SimConfig& config, const GeneratorParams& params,
               const std::string& map_id) {
  if (regions.empty()) throw EpisodeError("no cell fits the agent");
  std::uniform_real_distribution<double> heading(-kPi, kPi);
  std::uniform_real_distribution<double> speed(kMinPedestrianSpeed, kMaxPedestrianSpeed);
  std::uniform_real_distribution<double> phase(0.0, 1.0);

  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    const auto [s, component] = regions.draw(rng);
    if (component->size() < 2) continue;
    const world::Cell g = pick(*component, rng);

    Episode ep;
    ep.map_id = map_id;
    ep.agent_start = Pose(grid.center(s), heading(rng));
    ep.goal = grid.center(g);
    const auto geo = world::geodesic_distance(grid, ep.agent_start.position(), ep.goal);
    if (!geo || *geo < params.min_goal_geodesic) continue;

    bool ok = true;
    for (int i = 0; i < n_pedestrians && ok; ++i) {
      ok = false;
      for (int tries = 0; tries < 50 && !ok; ++tries) {
        PedestrianSpec p;
        p.start = grid.center(pick(*component, rng));
        p.end = grid.center(pick(*component, rng));
        p.speed = std::min(speed(rng), kMaxPedestrianSpeed);
        p.phase = phase(rng);
        const PatrolRoute route(p, grid);
        if (route.length() < params.min_patrol_length) continue;
        if (euclidean_distance(route.at(0, config.physics.dt).position(),
                               ep.agent_start.position()) < params.min_start_clearance)
          continue;
        ep.pedestrians.push_back(p);
        ok = true;
      }
    }
    if (!ok) continue;
    ep.seed = rng();
    return ep;
  }
  throw EpisodeError("no valid episode found within the attempt budget");
}

}  // namespace

Episode generate_episode(const world::OccupancyGrid& grid, Rng& rng, int n_pedestrians,
                         const SimConfig& config, const GeneratorParams& params,
                         std::string map_id) {
  if (n_pedestrians < 0) throw InputError("pedestrian count must be non-negative");
  config.validate();
  const StartRegions regions(grid, config.physics.agent_radius);
  return sample(grid, regions, rng, n_pedestrians, config, params, map_id);
}

std::vector<Episode> generate_episodes(const world::OccupancyGrid& grid, int count,
                                       std::uint64_t seed, int n_pedestrians,
                                       const SimConfig& config, const GeneratorParams& params,
                                       std::string map_id) {
  if (n_pedestrians < 0) throw InputError("pedestrian count must be non-negative");
  config.validate();
  const StartRegions regions(grid, config.physics.agent_radius);
  std::vector<Episode> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    out.push_back(sample(grid, regions, rng, n_pedestrians, config, params, map_id));
  }
  return out;
}

}  // namespace socnav::sim
