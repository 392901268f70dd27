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

#include "socnav/error.hpp"
#include "socnav/world.hpp"

namespace socnav::world {

namespace {

void fill_box(std::vector<std::uint8_t>& cells, int width, int height, int x0, int y0, int x1,
              int y1, std::uint8_t value) {
  for (int y = std::max(0, y0); y <= std::min(height - 1, y1); ++y)
    for (int x = std::max(0, x0); x <= std::min(width - 1, x1); ++x)
      cells[static_cast<std::size_t>(y) * width + x] = value;
}

}  // namespace

OccupancyGrid generate_map(std::uint64_t seed, const MapGenParams& p) {
  if (p.width < 20 || p.height < 20) throw InputError("procedural maps need at least 20x20 cells");
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  const int w = p.width;
  const int h = p.height;
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * h, 0);
  const int thickness = std::max(1, static_cast<int>(std::lround(0.2 / p.resolution)));
  const int door = std::max(2, static_cast<int>(std::lround(p.door_width / p.resolution)));

  // Partition walls grow from one map edge and stop short of the other, each
  // with a doorway, which produces corridors and occluding corners.
  for (int k = 0; k < p.interior_walls; ++k) {
    const bool vertical = uniform_int(0, 1) == 1;
    const int span = vertical ? h : w;
    const int across = vertical ? w : h;
    const int pos = uniform_int(across / 5, across - across / 5 - thickness);
    const int length = uniform_int(span * 2 / 5, span * 7 / 10);
    const bool from_low = uniform_int(0, 1) == 1;
    const int a = from_low ? 0 : span - length;
    const int b = from_low ? length - 1 : span - 1;
    const int door_at = uniform_int(a + door, std::max(a + door, b - 2 * door));
    if (vertical) {
      fill_box(cells, w, h, pos, a, pos + thickness - 1, b, 1);
      fill_box(cells, w, h, pos, door_at, pos + thickness - 1, door_at + door - 1, 0);
    } else {
      fill_box(cells, w, h, a, pos, b, pos + thickness - 1, 1);
      fill_box(cells, w, h, door_at, pos, door_at + door - 1, pos + thickness - 1, 0);
    }
  }

  const int pillar_min = std::max(2, static_cast<int>(std::lround(0.4 / p.resolution)));
  const int pillar_max = std::max(pillar_min, static_cast<int>(std::lround(1.0 / p.resolution)));
  for (int k = 0; k < p.pillars; ++k) {
    const int sx = uniform_int(pillar_min, pillar_max);
    const int sy = uniform_int(pillar_min, pillar_max);
    const int x = uniform_int(w / 10, w - w / 10 - sx);
    const int y = uniform_int(h / 10, h - h / 10 - sy);
    fill_box(cells, w, h, x, y, x + sx - 1, y + sy - 1, 1);
  }
  return OccupancyGrid(w, h, p.resolution, std::move(cells));
}

}  // namespace socnav::world
