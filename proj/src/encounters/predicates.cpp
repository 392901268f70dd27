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
#include <numeric>

#include "socnav/encounters.hpp"
#include "socnav/error.hpp"

namespace socnav::encounters {

void EncounterParams::validate() const {
  if (t_min <= 0 || t_front <= 0 || t_view <= 0 || t_blind <= 0)
    throw InputError("encounter time thresholds must be positive");
  if (!(d_max > 0.0) || !(theta_max > 0.0) || !(delta_slack > 0.0) || !(fov > 0.0) ||
      !(sight_range > 0.0) || !(min_displacement > 0.0) || !(d_diff_max > 0.0))
    throw InputError("encounter thresholds must be positive");
  if (t_front > t_min) throw InputError("t_front must not exceed t_min");
  if (theta_max > kPi) throw InputError("theta_max must not exceed pi");
}

std::string_view to_string(EncounterClass c) {
  switch (c) {
    case EncounterClass::FrontalApproach: return "FrontalApproach";
    case EncounterClass::Intersection: return "Intersection";
    case EncounterClass::BlindCorner: return "BlindCorner";
    case EncounterClass::PersonFollowing: return "PersonFollowing";
    case EncounterClass::Other: return "Other";
  }
  return "Other";
}

bool blind(const sim::TrajectoryLog& log, const world::OccupancyGrid& grid,
           const EncounterParams& params, int t, int ped) {
  if (t < 0 || t >= static_cast<int>(log.records.size())) throw InputError("blind: time out of range");
  const sim::StepRecord& r = log.records[static_cast<std::size_t>(t)];
  if (ped < 0 || ped >= static_cast<int>(r.pedestrians.size()))
    throw InputError("blind: pedestrian out of range");
  const Vec2 a = r.agent.position();
  const Vec2 p = r.pedestrians[static_cast<std::size_t>(ped)].position();
  const Vec2 d = p - a;
  if (angle_between(r.agent.theta(), std::atan2(d.y, d.x)) > params.fov / 2.0) return true;
  if (d.norm() > params.sight_range) return true;
  return !world::line_of_sight(grid, a, p);
}

std::optional<double> general_direction(std::span<const Vec2> positions, double min_displacement) {
  if (positions.size() < 2) return std::nullopt;
  const Vec2 d = positions.back() - positions.front();
  if (d.norm() < min_displacement) return std::nullopt;
  return std::atan2(d.y, d.x);
}

namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return (b - a).cross(c - a); }

bool within_box(Vec2 a, Vec2 b, Vec2 p) {
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

struct Span {
  double lo;
  double hi;
  int owner;  // 0 for a, 1 for b
  std::size_t seg;
};

}  // namespace

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int d1 = sign(orient(q1, q2, p1));
  const int d2 = sign(orient(q1, q2, p2));
  const int d3 = sign(orient(p1, p2, q1));
  const int d4 = sign(orient(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && within_box(q1, q2, p1)) return true;
  if (d2 == 0 && within_box(q1, q2, p2)) return true;
  if (d3 == 0 && within_box(p1, p2, q1)) return true;
  if (d4 == 0 && within_box(p1, p2, q2)) return true;
  return false;
}

bool paths_intersect(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) return false;
  // A single point is a zero-length segment.
  auto segment = [](std::span<const Vec2> poly, std::size_t i) {
    return poly.size() == 1 ? std::pair{poly[0], poly[0]} : std::pair{poly[i], poly[i + 1]};
  };
  const std::size_t na = std::max<std::size_t>(a.size() - 1, 1);
  const std::size_t nb = std::max<std::size_t>(b.size() - 1, 1);

  // Sweep over x: only segments whose x-extents overlap are tested.
  std::vector<Span> spans;
  spans.reserve(na + nb);
  for (std::size_t i = 0; i < na; ++i) {
    const auto [p, q] = segment(a, i);
    spans.push_back({std::min(p.x, q.x), std::max(p.x, q.x), 0, i});
  }
  for (std::size_t i = 0; i < nb; ++i) {
    const auto [p, q] = segment(b, i);
    spans.push_back({std::min(p.x, q.x), std::max(p.x, q.x), 1, i});
  }
  std::sort(spans.begin(), spans.end(), [](const Span& l, const Span& r) {
    return l.lo != r.lo ? l.lo < r.lo : l.owner < r.owner;
  });
  std::array<std::vector<const Span*>, 2> active;
  for (const Span& s : spans) {
    for (auto& list : active)
      std::erase_if(list, [&](const Span* o) { return o->hi < s.lo; });
    const auto [p1, p2] = segment(s.owner == 0 ? a : b, s.seg);
    for (const Span* o : active[static_cast<std::size_t>(1 - s.owner)]) {
      const auto [q1, q2] = segment(o->owner == 0 ? a : b, o->seg);
      if (segments_intersect(p1, p2, q1, q2)) return true;
    }
    active[static_cast<std::size_t>(s.owner)].push_back(&s);
  }
  return false;
}

}  // namespace socnav::encounters
