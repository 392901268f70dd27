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
#include <array>
#include <queue>
#include <sstream>

#include "socnav/error.hpp"
#include "socnav/world.hpp"

namespace socnav::world {

namespace {

struct Step {
  int dx;
  int dy;
  bool diagonal;
};

constexpr std::array<Step, 8> kSteps{{{1, 0, false},
                                      {-1, 0, false},
                                      {0, 1, false},
                                      {0, -1, false},
                                      {1, 1, true},
                                      {-1, 1, true},
                                      {1, -1, true},
                                      {-1, -1, true}}};

struct QueueEntry {
  double key;  // axial + diagonal * sqrt(2)
  int index;
};

// Min-heap on (cost, index): equal costs expand the lower row-major index first.
// Equal PathCosts produce bit-identical keys, and distinct costs on any grid
// below ~10^6 cells per side differ by far more than rounding, so ordering by
// key matches the exact order.
struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.key != b.key) return a.key > b.key;
    return a.index > b.index;
  }
};

double key_of(PathCost c) {
  return static_cast<double>(c.axial) + static_cast<double>(c.diagonal) * std::sqrt(2.0);
}

}  // namespace

double PathCost::meters(double resolution) const {
  return resolution * (static_cast<double>(axial) + static_cast<double>(diagonal) * std::sqrt(2.0));
}

bool operator<(PathCost a, PathCost b) {
  const std::int64_t da = a.axial - b.axial;
  const std::int64_t db = a.diagonal - b.diagonal;
  if (da <= 0 && db <= 0) return da < 0 || db < 0;
  if (da >= 0 && db >= 0) return false;
  // Mixed signs: sign of da + db * sqrt(2) via squares.
  if (da < 0) return 2 * db * db < da * da;
  return da * da < 2 * db * db;
}

bool diagonal_allowed(const OccupancyGrid& grid, Cell from, int dx, int dy) {
  return grid.free({from.cx + dx, from.cy}) || grid.free({from.cx, from.cy + dy});
}

DistanceField::DistanceField(const OccupancyGrid& grid, Cell source, double cutoff_m,
                             std::optional<Cell> stop_at)
    : grid_(&grid),
      source_(source),
      cost_(grid.cell_count()),
      settled_(grid.cell_count(), 0),
      parents_(grid.cell_count(), kNoParent) {
  if (!grid.free(source)) return;
  std::vector<std::uint8_t> seen(grid.cell_count(), 0);
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> open;
  const int src = grid.index(source);
  seen[static_cast<std::size_t>(src)] = 1;
  open.push({0.0, src});
  const int stop_index = stop_at && grid.in_bounds(*stop_at) ? grid.index(*stop_at) : -1;
  const double res = grid.resolution();
  const bool bounded = cutoff_m < std::numeric_limits<double>::infinity();

  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    auto& done = settled_[static_cast<std::size_t>(top.index)];
    if (done) continue;
    done = 1;
    const PathCost here = cost_[static_cast<std::size_t>(top.index)];
    if (top.index == stop_index) break;
    const Cell c = grid.cell_at(top.index);
    for (const Step& s : kSteps) {
      const Cell n{c.cx + s.dx, c.cy + s.dy};
      if (grid.occupied(n)) continue;
      if (s.diagonal && !diagonal_allowed(grid, c, s.dx, s.dy)) continue;
      const int ni = grid.index(n);
      const auto nu = static_cast<std::size_t>(ni);
      if (settled_[nu]) continue;
      PathCost next = here;
      (s.diagonal ? next.diagonal : next.axial) += 1;
      if (bounded && next.meters(res) > cutoff_m) continue;
      if (!seen[nu] || next < cost_[nu]) {
        seen[nu] = 1;
        cost_[nu] = next;
        parents_[nu] = top.index;
        open.push({key_of(next), ni});
      }
    }
  }
}

bool DistanceField::reached(Cell c) const {
  return grid_->in_bounds(c) && settled_[static_cast<std::size_t>(grid_->index(c))];
}

std::optional<PathCost> DistanceField::cost(Cell c) const {
  if (!reached(c)) return std::nullopt;
  return cost_[static_cast<std::size_t>(grid_->index(c))];
}

std::optional<double> DistanceField::meters(Cell c) const {
  auto pc = cost(c);
  if (!pc) return std::nullopt;
  return pc->meters(grid_->resolution());
}

Cell snap_to_free(const OccupancyGrid& grid, Vec2 p) {
  if (!grid.contains(p)) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") is outside the grid";
    throw InputError(os.str());
  }
  const Cell c = grid.cell_of(p);
  if (grid.free(c)) return c;
  std::optional<Cell> best;
  double best_d = 0.0;
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) {
      const Cell n{c.cx + dx, c.cy + dy};
      if (grid.occupied(n)) continue;
      const double d = euclidean_distance(p, grid.center(n));
      if (!best || d < best_d || (d == best_d && grid.index(n) < grid.index(*best))) {
        best = n;
        best_d = d;
      }
    }
  }
  if (!best) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") is inside an obstacle with no free cell nearby";
    throw InputError(os.str());
  }
  return *best;
}

PathResult trace_path(const OccupancyGrid& grid, const DistanceField& field, Cell target) {
  PathResult out;
  const auto cost = field.cost(target);
  if (!cost) return out;
  std::vector<int> chain;
  for (int i = grid.index(target); i != DistanceField::kNoParent; i = field.parent(i))
    chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  out.waypoints.reserve(chain.size());
  for (int i : chain) out.waypoints.push_back(grid.center(grid.cell_at(i)));
  out.cost = *cost;
  out.length = cost->meters(grid.resolution());
  return out;
}

std::optional<double> geodesic_distance(const OccupancyGrid& grid, Vec2 a, Vec2 b) {
  const Cell ca = snap_to_free(grid, a);
  const Cell cb = snap_to_free(grid, b);
  if (ca == cb) return 0.0;
  DistanceField field(grid, ca, std::numeric_limits<double>::infinity(), cb);
  return field.meters(cb);
}

std::optional<PathResult> shortest_path(const OccupancyGrid& grid, Vec2 a, Vec2 b) {
  const Cell ca = snap_to_free(grid, a);
  const Cell cb = snap_to_free(grid, b);
  DistanceField field(grid, ca, std::numeric_limits<double>::infinity(), cb);
  if (!field.reached(cb)) return std::nullopt;
  return trace_path(grid, field, cb);
}

}  // namespace socnav::world
