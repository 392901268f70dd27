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

#include "socnav/encounters.hpp"
#include "socnav/error.hpp"

namespace socnav::encounters {

namespace {

// Geodesic agent-to-pedestrian distances below d_max for every record,
// nullopt when at least d_max. One bounded field per agent cell, reused
// while the agent stays in that cell.
class CloseDistances {
 public:
  CloseDistances(const sim::TrajectoryLog& log, const world::OccupancyGrid& grid, double d_max)
      : log_(log), grid_(grid), d_max_(d_max) {}

  std::optional<double> at(int t, int ped) {
    const sim::StepRecord& r = log_.records[static_cast<std::size_t>(t)];
    const Vec2 a = r.agent.position();
    const Vec2 p = r.pedestrians[static_cast<std::size_t>(ped)].position();
    // Cell centers are within res/sqrt(2) of the points they hold.
    if (euclidean_distance(a, p) >= d_max_ + grid_.resolution() * std::sqrt(2.0)) return std::nullopt;
    if (!grid_.contains(a) || !grid_.contains(p)) return std::nullopt;
    const world::Cell ac = world::snap_to_free(grid_, a);
    const world::Cell pc = world::snap_to_free(grid_, p);
    if (!field_ || !(field_->source() == ac)) field_.emplace(grid_, ac, d_max_);
    const auto m = field_->meters(pc);
    if (!m || *m >= d_max_) return std::nullopt;
    return m;
  }

 private:
  const sim::TrajectoryLog& log_;
  const world::OccupancyGrid& grid_;
  double d_max_;
  std::optional<world::DistanceField> field_;
};

double bearing_error(const sim::StepRecord& r, int ped) {
  const Vec2 d = r.pedestrians[static_cast<std::size_t>(ped)].position() - r.agent.position();
  return angle_between(r.agent.theta(), std::atan2(d.y, d.x));
}

std::vector<Vec2> agent_track(const sim::TrajectoryLog& log, int t1, int t2) {
  std::vector<Vec2> out;
  for (int t = t1; t <= t2; ++t) out.push_back(log.records[static_cast<std::size_t>(t)].agent.position());
  return out;
}

std::vector<Vec2> pedestrian_track(const sim::TrajectoryLog& log, int ped, int t1, int t2) {
  std::vector<Vec2> out;
  for (int t = t1; t <= t2; ++t)
    out.push_back(log.records[static_cast<std::size_t>(t)].pedestrians[static_cast<std::size_t>(ped)].position());
  return out;
}

void check_encounter(const Encounter& e, const sim::TrajectoryLog& log) {
  if (e.t1 < 0 || e.t2 < e.t1 || e.t2 >= static_cast<int>(log.records.size()))
    throw InputError("encounter interval outside the log");
  if (e.pedestrian < 0 || e.pedestrian >= static_cast<int>(log.records.front().pedestrians.size()))
    throw InputError("encounter pedestrian outside the log");
}

}  // namespace

std::vector<Encounter> extract_encounters(const sim::TrajectoryLog& log,
                                          const world::OccupancyGrid& grid,
                                          const EncounterParams& params, int episode) {
  params.validate();
  std::vector<Encounter> out;
  if (log.records.empty()) return out;
  const int n_ped = static_cast<int>(log.records.front().pedestrians.size());
  const int last = static_cast<int>(log.records.size()) - 1;
  for (const auto& r : log.records)
    if (static_cast<int>(r.pedestrians.size()) != n_ped) throw InputError("log: pedestrian count varies");

  // Close flags for every (pedestrian, t), computed in time order so the
  // agent-cell field is reused across pedestrians.
  CloseDistances dist(log, grid, params.d_max);
  std::vector<std::vector<char>> close(static_cast<std::size_t>(n_ped),
                                       std::vector<char>(static_cast<std::size_t>(last) + 1, 0));
  for (int t = 0; t <= last; ++t)
    for (int i = 0; i < n_ped; ++i)
      close[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = dist.at(t, i).has_value();

  const sim::StepRecord& final_record = log.records.back();
  for (int i = 0; i < n_ped; ++i) {
    const auto& flags = close[static_cast<std::size_t>(i)];
    int t = 0;
    while (t <= last) {
      if (!flags[static_cast<std::size_t>(t)]) {
        ++t;
        continue;
      }
      const int t1 = t;
      while (t + 1 <= last && flags[static_cast<std::size_t>(t + 1)]) ++t;
      const int t2 = t;
      ++t;
      if (t2 - t1 < params.t_min) continue;
      bool ahead = true;
      for (int s = t1; s <= t1 + params.t_front && ahead; ++s)
        ahead = bearing_error(log.records[static_cast<std::size_t>(s)], i) <= params.theta_max;
      if (!ahead) continue;
      Encounter e;
      e.episode = episode;
      e.pedestrian = i;
      e.t1 = t1;
      e.t2 = t2;
      e.collided = final_record.outcome.human_coll && final_record.outcome.human_id == i &&
                   final_record.t >= t1 && final_record.t <= t2;
      out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end(), [](const Encounter& a, const Encounter& b) {
    return a.t1 != b.t1 ? a.t1 < b.t1 : a.pedestrian < b.pedestrian;
  });
  return out;
}

RuleEvidence gather_evidence(const Encounter& e, const sim::TrajectoryLog& log,
                             const world::OccupancyGrid& grid, const EncounterParams& params) {
  check_encounter(e, log);
  RuleEvidence ev;
  ev.blind_prefix = true;
  for (int t = e.t1; t <= std::min(e.t1 + params.t_blind, e.t2) && ev.blind_prefix; ++t)
    ev.blind_prefix = blind(log, grid, params, t, e.pedestrian);
  ev.visible_prefix = true;
  for (int t = e.t1; t <= std::min(e.t1 + params.t_view, e.t2) && ev.visible_prefix; ++t)
    ev.visible_prefix = !blind(log, grid, params, t, e.pedestrian);

  const sim::StepRecord& r1 = log.records[static_cast<std::size_t>(e.t1)];
  const Vec2 a1 = r1.agent.position();
  const Vec2 p1 = r1.pedestrians[static_cast<std::size_t>(e.pedestrian)].position();
  if (const auto geo = world::geodesic_distance(grid, a1, p1))
    ev.d_diff_t1 = *geo - euclidean_distance(a1, p1);

  const auto agent = agent_track(log, e.t1, e.t2);
  const auto ped = pedestrian_track(log, e.pedestrian, e.t1, e.t2);
  const auto da = general_direction(agent, params.min_displacement);
  const auto dp = general_direction(ped, params.min_displacement);
  if (da && dp) ev.angle_diff = angle_between(*dp, *da);
  ev.intersect = paths_intersect(agent, ped);
  return ev;
}

bool satisfies(EncounterClass c, const RuleEvidence& ev, const EncounterParams& params) {
  const double slack = params.delta_slack;
  switch (c) {
    case EncounterClass::BlindCorner:
      return ev.blind_prefix && ev.d_diff_t1 && *ev.d_diff_t1 <= params.d_diff_max;
    case EncounterClass::FrontalApproach:
      return ev.visible_prefix && ev.angle_diff && *ev.angle_diff >= kPi - slack;
    case EncounterClass::Intersection:
      return ev.visible_prefix && ev.angle_diff && std::abs(*ev.angle_diff - kPi / 2.0) <= slack &&
             ev.intersect;
    case EncounterClass::PersonFollowing:
      return ev.visible_prefix && ev.angle_diff && *ev.angle_diff <= slack;
    case EncounterClass::Other:
      return true;
  }
  return false;
}

EncounterClass classify(const Encounter& e, const sim::TrajectoryLog& log,
                        const world::OccupancyGrid& grid, const EncounterParams& params) {
  const RuleEvidence ev = gather_evidence(e, log, grid, params);
  for (EncounterClass c : {EncounterClass::BlindCorner, EncounterClass::FrontalApproach,
                           EncounterClass::Intersection, EncounterClass::PersonFollowing})
    if (satisfies(c, ev, params)) return c;
  return EncounterClass::Other;
}

std::vector<Encounter> analyze_log(const sim::TrajectoryLog& log, const world::OccupancyGrid& grid,
                                   const EncounterParams& params, int episode) {
  auto out = extract_encounters(log, grid, params, episode);
  for (Encounter& e : out) e.clazz = classify(e, log, grid, params);
  return out;
}

}  // namespace socnav::encounters
