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

// Test-only reference implementations. None of these call into the code
// paths they are used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "socnav/geometry.hpp"
#include "socnav/world.hpp"

namespace socnav::oracle {

// Path cost as (axial, diagonal) counts; compared through long double, which
// separates a + b*sqrt(2) values of different counts for the map sizes used
// in tests.
struct Counts {
  long long axial = -1;
  long long diag = -1;
  bool valid() const { return axial >= 0; }
  long double value() const { return axial + diag * std::sqrt(2.0L); }
};

inline bool occupied(const world::OccupancyGrid& g, int x, int y) {
  if (x < 0 || y < 0 || x >= g.width() || y >= g.height()) return true;
  return g.cells()[static_cast<std::size_t>(y) * g.width() + x] != 0;
}

/// Bellman-Ford style relaxation to a fixed point over the 8-connected graph.
inline std::vector<Counts> relaxation_distances(const world::OccupancyGrid& g, int sx, int sy) {
  const int w = g.width();
  const int h = g.height();
  std::vector<Counts> dist(static_cast<std::size_t>(w) * h);
  if (occupied(g, sx, sy)) return dist;
  dist[static_cast<std::size_t>(sy) * w + sx] = {0, 0};
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (occupied(g, x, y)) continue;
        const Counts here = dist[static_cast<std::size_t>(y) * w + x];
        if (!here.valid()) continue;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (occupied(g, nx, ny)) continue;
            const bool diag = dx != 0 && dy != 0;
            if (diag && occupied(g, x + dx, y) && occupied(g, x, y + dy)) continue;
            Counts cand = here;
            (diag ? cand.diag : cand.axial) += 1;
            Counts& there = dist[static_cast<std::size_t>(ny) * w + nx];
            if (!there.valid() || cand.value() < there.value() - 1e-12L) {
              there = cand;
              changed = true;
            }
          }
        }
      }
    }
  }
  return dist;
}

inline std::optional<double> geodesic(const world::OccupancyGrid& g, int sx, int sy, int tx,
                                      int ty) {
  const auto d = relaxation_distances(g, sx, sy);
  const Counts c = d[static_cast<std::size_t>(ty) * g.width() + tx];
  if (!c.valid()) return std::nullopt;
  return g.resolution() *
         (static_cast<double>(c.axial) + static_cast<double>(c.diag) * std::sqrt(2.0));
}

/// Segment vs every occupied cell's closed square.
inline bool los_all_cells(const world::OccupancyGrid& g, Vec2 a, Vec2 b) {
  const double r = g.resolution();
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x)
      if (occupied(g, x, y) &&
          world::segment_touches_box(a, b, {x * r, y * r}, {(x + 1) * r, (y + 1) * r}))
        return false;
  return true;
}

/// Samples the segment at resolution / 10 and reports whether any sample falls
/// in an occupied cell.
inline bool los_dense_sampling(const world::OccupancyGrid& g, Vec2 a, Vec2 b) {
  const double len = euclidean_distance(a, b);
  const int n = std::max(1, static_cast<int>(std::ceil(len / (g.resolution() / 10.0))));
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const Vec2 p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    if (occupied(g, static_cast<int>(std::floor(p.x / g.resolution())),
                 static_cast<int>(std::floor(p.y / g.resolution()))))
      return false;
  }
  return true;
}

inline world::OccupancyGrid random_grid(std::mt19937_64& rng, int max_side, double fill) {
  std::uniform_int_distribution<int> side(2, max_side);
  std::bernoulli_distribution wall(fill);
  const int w = side(rng);
  const int h = side(rng);
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * h);
  for (auto& c : cells) c = wall(rng) ? 1 : 0;
  return world::OccupancyGrid(w, h, 0.1, std::move(cells));
}

}  // namespace socnav::oracle

namespace socnav::oracle {

// Social features recomputed person by person in the agent's local frame.
inline double risk_bruteforce(Vec2 agent, const std::vector<Vec2>& people, double radius) {
  double best = 0.0;
  for (Vec2 p : people) {
    const double d = std::sqrt((p.x - agent.x) * (p.x - agent.x) + (p.y - agent.y) * (p.y - agent.y));
    const double v = 1.0 - d / radius;
    best = std::max(best, std::min(1.0, v));
  }
  return best;
}

inline double local_clockwise_angle(Vec2 agent, double heading, Vec2 p) {
  const double dx = p.x - agent.x;
  const double dy = p.y - agent.y;
  if (dx == 0.0 && dy == 0.0) return 0.0;
  const double lx = std::cos(heading) * dx + std::sin(heading) * dy;
  const double ly = -std::sin(heading) * dx + std::cos(heading) * dy;
  double a = std::atan2(-ly, lx);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a = 0.0;
  return a;
}

inline std::vector<double> compass_bruteforce(Vec2 agent, double heading,
                                              const std::vector<Vec2>& people, double radius,
                                              int k) {
  std::vector<double> out(static_cast<std::size_t>(k), 0.0);
  for (int j = 0; j < k; ++j) {
    const double lo = 2.0 * kPi * j / k;
    const double hi = 2.0 * kPi * (j + 1) / k;
    for (Vec2 p : people) {
      const double a = local_clockwise_angle(agent, heading, p);
      const bool inside = a >= lo && (a < hi || j == k - 1);
      if (!inside) continue;
      const double d = std::sqrt((p.x - agent.x) * (p.x - agent.x) + (p.y - agent.y) * (p.y - agent.y));
      out[static_cast<std::size_t>(j)] =
          std::max(out[static_cast<std::size_t>(j)], std::clamp(1.0 - d / radius, 0.0, 1.0));
    }
  }
  return out;
}

}  // namespace socnav::oracle
