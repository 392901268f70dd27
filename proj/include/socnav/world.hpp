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
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socnav/geometry.hpp"

namespace socnav::world {

/// Integer cell coordinates; cy counts rows upward from y = 0.
struct Cell {
  int cx = 0;
  int cy = 0;
  friend constexpr bool operator==(Cell, Cell) = default;
};

/// Immutable boolean occupancy grid with metric resolution.
///
/// Cells are stored row-major with index cy * width + cx, where row cy = 0 is
/// the bottom (y in [0, resolution)). Everything outside the grid is treated
/// as wall, so motion and path queries never leave the map.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  /// Throws InputError on non-positive sizes, resolution <= 0, or a cell
  /// count that does not equal width * height.
  OccupancyGrid(int width, int height, double resolution, std::vector<std::uint8_t> occupied);

  static OccupancyGrid empty(int width, int height, double resolution);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  std::size_t cell_count() const { return cells_.size(); }

  bool in_bounds(Cell c) const { return c.cx >= 0 && c.cy >= 0 && c.cx < width_ && c.cy < height_; }
  bool contains(Vec2 p) const;

  /// Out-of-grid cells report occupied.
  bool occupied(Cell c) const { return !in_bounds(c) || cells_[index(c)] != 0; }
  bool free(Cell c) const { return !occupied(c); }

  int index(Cell c) const { return c.cy * width_ + c.cx; }
  Cell cell_at(int index) const { return {index % width_, index / width_}; }
  /// floor(coord / resolution) on each axis; may be out of bounds.
  Cell cell_of(Vec2 p) const;
  Vec2 center(Cell c) const;

  const std::vector<std::uint8_t>& cells() const { return cells_; }

  /// Copy with the given cells marked occupied.
  OccupancyGrid with_occupied(const std::vector<Cell>& extra) const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  std::vector<std::uint8_t> cells_;
};

/// Exact cost of an 8-connected path: axial * res + diagonal * res * sqrt(2).
///
/// Comparisons are exact integer arithmetic, so ties and symmetry do not
/// depend on floating-point summation order.
struct PathCost {
  std::int64_t axial = 0;
  std::int64_t diagonal = 0;

  double meters(double resolution) const;
  friend bool operator==(PathCost, PathCost) = default;
  /// Orders by axial + diagonal * sqrt(2).
  friend bool operator<(PathCost a, PathCost b);
};

/// Single-source Dijkstra result over the 8-connected free-cell graph.
class DistanceField {
 public:
  static constexpr int kNoParent = -1;

  /// Costs above cutoff_m are left unreached. With stop_at set, expansion
  /// halts once that cell is settled.
  DistanceField(const OccupancyGrid& grid, Cell source,
                double cutoff_m = std::numeric_limits<double>::infinity(),
                std::optional<Cell> stop_at = std::nullopt);

  Cell source() const { return source_; }
  bool reached(Cell c) const;
  /// Cost from the source; nullopt when unreached (or beyond the cutoff).
  std::optional<PathCost> cost(Cell c) const;
  std::optional<double> meters(Cell c) const;
  /// Predecessor index on the deterministic shortest path tree.
  int parent(int index) const { return parents_[static_cast<std::size_t>(index)]; }

 private:
  const OccupancyGrid* grid_;
  Cell source_;
  std::vector<PathCost> cost_;
  std::vector<std::uint8_t> settled_;
  std::vector<int> parents_;
};

struct PathResult {
  std::vector<Vec2> waypoints;  // cell centers, consecutive ones 8-adjacent
  double length = 0.0;          // meters
  PathCost cost;
};

/// A diagonal move is rejected only when both axial cells beside it are occupied.
bool diagonal_allowed(const OccupancyGrid& grid, Cell from, int dx, int dy);

/// Maps a query point to a free cell: its own cell when free, otherwise the
/// free cell (Chebyshev radius <= 2) whose center is nearest, lower index on
/// ties. Throws InputError when out of bounds or nothing free is close enough.
Cell snap_to_free(const OccupancyGrid& grid, Vec2 p);

/// Length of the shortest 8-connected path between the cells containing a and
/// b; nullopt when unreachable. Throws InputError (see snap_to_free).
std::optional<double> geodesic_distance(const OccupancyGrid& grid, Vec2 a, Vec2 b);

/// Waypoints realising geodesic_distance(a, b); nullopt when unreachable.
std::optional<PathResult> shortest_path(const OccupancyGrid& grid, Vec2 a, Vec2 b);

/// Path extraction from a field computed at the path's source.
PathResult trace_path(const OccupancyGrid& grid, const DistanceField& field, Cell target);

/// Greedy line-of-sight shortcutting of a waypoint chain: each kept point
/// jumps to the farthest later point visible without an intervening
/// failure. Consecutive points that cannot see each other are kept.
std::vector<Vec2> shortcut_path(const OccupancyGrid& grid, const std::vector<Vec2>& waypoints);

/// Length of the shortcut grid path from a to b, with the exact endpoints in
/// place of their cell centers. Close to the continuous shortest path, where
/// geodesic_distance overestimates by up to ~8% on slanted routes.
std::optional<double> taut_distance(const OccupancyGrid& grid, Vec2 a, Vec2 b);

/// True iff the segment touches no occupied in-grid cell. A cell is touched
/// when the segment meets its closed square, so grazing a corner blocks.
/// Throws InputError for out-of-bounds endpoints.
bool line_of_sight(const OccupancyGrid& grid, Vec2 from, Vec2 to);

/// Closed segment vs closed axis-aligned box test (exposed for the oracle tests).
bool segment_touches_box(Vec2 a, Vec2 b, Vec2 box_min, Vec2 box_max);

/// Distance along a ray to the first occupied cell (or map edge), capped at
/// max_range.
double raycast(const OccupancyGrid& grid, Vec2 origin, double angle, double max_range);

/// True iff a disc intersects any occupied cell (outside counts as occupied).
bool disc_collides(const OccupancyGrid& grid, Vec2 center, double radius);

/// Grid marking every cell whose center lies within `clearance` of an
/// occupied cell (or the map edge) as occupied.
OccupancyGrid inflate(const OccupancyGrid& grid, double clearance);

// Map file: "W H RES" then H lines of W chars, '#' occupied, '.' free,
// first line is the top row. write_map emits a canonical form, so
// read -> write -> read -> write is byte-stable.
OccupancyGrid read_map(std::istream& in);
OccupancyGrid read_map_file(const std::string& path);
void write_map(std::ostream& out, const OccupancyGrid& grid);
std::string map_to_string(const OccupancyGrid& grid);
OccupancyGrid map_from_string(std::string_view text);

struct MapGenParams {
  int width = 100;
  int height = 100;
  double resolution = 0.1;
  int interior_walls = 3;
  int pillars = 4;
  double door_width = 1.2;
};

/// Procedural indoor layout: partition walls with doorways plus pillars.
/// Deterministic in the seed.
OccupancyGrid generate_map(std::uint64_t seed, const MapGenParams& params = {});

}  // namespace socnav::world
