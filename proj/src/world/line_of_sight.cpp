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
#include <limits>
#include <sstream>
#include <utility>

#include "socnav/error.hpp"
#include "socnav/world.hpp"

namespace socnav::world {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Grid traversal state for a ray a + t * d, t >= 0 (Amanatides & Woo).
struct Traversal {
  Cell cell;
  int step_x = 0;
  int step_y = 0;
  double t_max_x = kInf;
  double t_max_y = kInf;
  double t_delta_x = kInf;
  double t_delta_y = kInf;

  Traversal(const OccupancyGrid& grid, Vec2 a, Vec2 d) : cell(grid.cell_of(a)) {
    const double res = grid.resolution();
    if (d.x > 0) {
      step_x = 1;
      t_delta_x = res / d.x;
      t_max_x = ((cell.cx + 1) * res - a.x) / d.x;
    } else if (d.x < 0) {
      step_x = -1;
      t_delta_x = -res / d.x;
      t_max_x = (cell.cx * res - a.x) / d.x;
    }
    if (d.y > 0) {
      step_y = 1;
      t_delta_y = res / d.y;
      t_max_y = ((cell.cy + 1) * res - a.y) / d.y;
    } else if (d.y < 0) {
      step_y = -1;
      t_delta_y = -res / d.y;
      t_max_y = (cell.cy * res - a.y) / d.y;
    }
  }

  // Parameter at which the current cell is left.
  double exit_t() const { return std::min(t_max_x, t_max_y); }

  void advance() {
    if (t_max_x < t_max_y) {
      cell.cx += step_x;
      t_max_x += t_delta_x;
    } else if (t_max_y < t_max_x) {
      cell.cy += step_y;
      t_max_y += t_delta_y;
    } else {
      cell.cx += step_x;
      cell.cy += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    }
  }
};

void require_in_bounds(const OccupancyGrid& grid, Vec2 p) {
  if (!grid.contains(p)) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") is outside the grid";
    throw InputError(os.str());
  }
}

}  // namespace

bool segment_touches_box(Vec2 a, Vec2 b, Vec2 box_min, Vec2 box_max) {
  if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
  double t0 = 0.0;
  double t1 = 1.0;
  const double d[2] = {b.x - a.x, b.y - a.y};
  const double o[2] = {a.x, a.y};
  const double lo[2] = {box_min.x, box_min.y};
  const double hi[2] = {box_max.x, box_max.y};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (o[k] < lo[k] || o[k] > hi[k]) return false;
      continue;
    }
    double ta = (lo[k] - o[k]) / d[k];
    double tb = (hi[k] - o[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

bool line_of_sight(const OccupancyGrid& grid, Vec2 from, Vec2 to) {
  require_in_bounds(grid, from);
  require_in_bounds(grid, to);
  // Canonical endpoint order keeps the predicate exactly symmetric.
  if (to.x < from.x || (to.x == from.x && to.y < from.y)) std::swap(from, to);

  const double res = grid.resolution();
  auto blocked_near = [&](Cell c) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const Cell n{c.cx + dx, c.cy + dy};
        if (!grid.in_bounds(n) || grid.free(n)) continue;
        if (segment_touches_box(from, to, {n.cx * res, n.cy * res},
                                {(n.cx + 1) * res, (n.cy + 1) * res}))
          return true;
      }
    }
    return false;
  };

  // Every point of the segment lies in a traversed cell, and any closed cell
  // square it meets is within one cell of that point's cell.
  Traversal walk(grid, from, to - from);
  const Cell last = grid.cell_of(to);
  const int budget = std::abs(last.cx - walk.cell.cx) + std::abs(last.cy - walk.cell.cy) + 2;
  for (int i = 0; i <= budget; ++i) {
    if (blocked_near(walk.cell)) return false;
    if (walk.cell == last || walk.exit_t() > 1.0) break;
    walk.advance();
  }
  return !blocked_near(last);
}

double raycast(const OccupancyGrid& grid, Vec2 origin, double angle, double max_range) {
  const Vec2 dir{std::cos(angle), std::sin(angle)};
  Traversal walk(grid, origin, dir);
  if (grid.occupied(walk.cell)) return 0.0;
  const double res = grid.resolution();
  const int budget = static_cast<int>(2.0 * max_range / res) + 4;
  for (int i = 0; i < budget; ++i) {
    const double t = walk.exit_t();
    if (t >= max_range) return max_range;
    walk.advance();
    if (grid.occupied(walk.cell)) return std::max(0.0, t);
  }
  return max_range;
}

std::vector<Vec2> shortcut_path(const OccupancyGrid& grid, const std::vector<Vec2>& waypoints) {
  if (waypoints.size() <= 2) return waypoints;
  std::vector<Vec2> out{waypoints.front()};
  std::size_t i = 0;
  while (i + 1 < waypoints.size()) {
    std::size_t next = i + 1;
    for (std::size_t j = i + 1; j < waypoints.size(); ++j) {
      if (!line_of_sight(grid, waypoints[i], waypoints[j])) break;
      next = j;
    }
    out.push_back(waypoints[next]);
    i = next;
  }
  return out;
}

std::optional<double> taut_distance(const OccupancyGrid& grid, Vec2 a, Vec2 b) {
  auto path = shortest_path(grid, a, b);
  if (!path) return std::nullopt;
  std::vector<Vec2> pts = std::move(path->waypoints);
  if (pts.size() == 1) return euclidean_distance(a, b);
  pts.front() = a;
  pts.back() = b;
  const auto taut = shortcut_path(grid, pts);
  double len = 0.0;
  for (std::size_t k = 1; k < taut.size(); ++k) len += euclidean_distance(taut[k - 1], taut[k]);
  return len;
}

}  // namespace socnav::world
