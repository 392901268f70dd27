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
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "socnav/error.hpp"
#include "socnav/world.hpp"

namespace socnav::world {

OccupancyGrid::OccupancyGrid(int width, int height, double resolution,
                             std::vector<std::uint8_t> occupied)
    : width_(width), height_(height), resolution_(resolution), cells_(std::move(occupied)) {
  if (width <= 0 || height <= 0) throw InputError("grid dimensions must be positive");
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw InputError("grid resolution must be positive");
  if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw InputError("grid cell count does not match width * height");
  for (auto& c : cells_) c = c ? 1 : 0;
}

OccupancyGrid OccupancyGrid::empty(int width, int height, double resolution) {
  return OccupancyGrid(width, height, resolution,
                       std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 0));
}

bool OccupancyGrid::contains(Vec2 p) const {
  return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 && p.y >= 0.0 &&
         p.x < width_ * resolution_ && p.y < height_ * resolution_ && in_bounds(cell_of(p));
}

Cell OccupancyGrid::cell_of(Vec2 p) const {
  return {static_cast<int>(std::floor(p.x / resolution_)),
          static_cast<int>(std::floor(p.y / resolution_))};
}

Vec2 OccupancyGrid::center(Cell c) const {
  return {(c.cx + 0.5) * resolution_, (c.cy + 0.5) * resolution_};
}

OccupancyGrid OccupancyGrid::with_occupied(const std::vector<Cell>& extra) const {
  OccupancyGrid out = *this;
  for (Cell c : extra)
    if (in_bounds(c)) out.cells_[index(c)] = 1;
  return out;
}

bool disc_collides(const OccupancyGrid& grid, Vec2 center, double radius) {
  const double res = grid.resolution();
  const int x0 = static_cast<int>(std::floor((center.x - radius) / res));
  const int x1 = static_cast<int>(std::floor((center.x + radius) / res));
  const int y0 = static_cast<int>(std::floor((center.y - radius) / res));
  const int y1 = static_cast<int>(std::floor((center.y + radius) / res));
  for (int cy = y0; cy <= y1; ++cy) {
    for (int cx = x0; cx <= x1; ++cx) {
      if (!grid.occupied({cx, cy})) continue;
      const double nx = std::clamp(center.x, cx * res, (cx + 1) * res);
      const double ny = std::clamp(center.y, cy * res, (cy + 1) * res);
      if (std::hypot(center.x - nx, center.y - ny) < radius) return true;
    }
  }
  return false;
}

OccupancyGrid inflate(const OccupancyGrid& grid, double clearance) {
  std::vector<std::uint8_t> cells(grid.cell_count(), 0);
  for (int i = 0; i < static_cast<int>(grid.cell_count()); ++i) {
    const Cell c = grid.cell_at(i);
    cells[static_cast<std::size_t>(i)] =
        grid.occupied(c) || disc_collides(grid, grid.center(c), clearance);
  }
  return OccupancyGrid(grid.width(), grid.height(), grid.resolution(), std::move(cells));
}

OccupancyGrid read_map(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw InputError("map: missing header line");
  std::istringstream hs(header);
  int w = 0, h = 0;
  double res = 0.0;
  if (!(hs >> w >> h >> res)) throw InputError("map: header must be 'W H RES'");
  std::string rest;
  if (hs >> rest) throw InputError("map: trailing tokens in header");
  if (w <= 0 || h <= 0 || !(res > 0.0)) throw InputError("map: invalid header values");

  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * h, 0);
  std::string line;
  for (int row = 0; row < h; ++row) {
    if (!std::getline(in, line)) throw InputError("map: expected " + std::to_string(h) + " rows");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != w)
      throw InputError("map: row " + std::to_string(row) + " has wrong width");
    const int cy = h - 1 - row;
    for (int cx = 0; cx < w; ++cx) {
      const char ch = line[static_cast<std::size_t>(cx)];
      if (ch == '#') {
        cells[static_cast<std::size_t>(cy) * w + cx] = 1;
      } else if (ch != '.') {
        throw InputError(std::string("map: unexpected character '") + ch + "'");
      }
    }
  }
  return OccupancyGrid(w, h, res, std::move(cells));
}

OccupancyGrid read_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open map file: " + path);
  return read_map(in);
}

void write_map(std::ostream& out, const OccupancyGrid& grid) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), grid.resolution());
  out << grid.width() << ' ' << grid.height() << ' ' << std::string_view(buf, res.ptr - buf)
      << '\n';
  std::string line(static_cast<std::size_t>(grid.width()), '.');
  for (int cy = grid.height() - 1; cy >= 0; --cy) {
    for (int cx = 0; cx < grid.width(); ++cx)
      line[static_cast<std::size_t>(cx)] = grid.occupied({cx, cy}) ? '#' : '.';
    out << line << '\n';
  }
}

std::string map_to_string(const OccupancyGrid& grid) {
  std::ostringstream os;
  write_map(os, grid);
  return os.str();
}

OccupancyGrid map_from_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_map(in);
}

}  // namespace socnav::world
