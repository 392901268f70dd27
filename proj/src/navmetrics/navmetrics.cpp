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
#include <cmath>
#include <nlohmann/json.hpp>
#include <ostream>

#include "socnav/error.hpp"
#include "socnav/navmetrics.hpp"

namespace socnav::navmetrics {

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string shortest_repr(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

EpisodeMetrics episode_metrics(const sim::TrajectoryLog& log, const world::OccupancyGrid& grid) {
  if (log.records.empty()) throw InputError("episode metrics: empty log");
  EpisodeMetrics m;
  m.success = log.status == sim::Status::Success;
  m.human_collision = log.status == sim::Status::HumanCollision;
  m.timeout = log.status == sim::Status::Timeout;
  m.steps = log.t_end;
  for (std::size_t i = 1; i < log.records.size(); ++i)
    m.path_length +=
        euclidean_distance(log.records[i - 1].agent.position(), log.records[i].agent.position());
  const Vec2 start = log.episode.agent_start.position();
  const auto geo = world::geodesic_distance(grid, start, log.episode.goal);
  if (!geo) throw InputError("episode metrics: goal unreachable on the grid");
  m.grid_geodesic = *geo;
  m.shortest_length = *world::taut_distance(grid, start, log.episode.goal);
  if (m.success) {
    const double denom = std::max(m.path_length, m.shortest_length);
    m.spl = denom > 0.0 ? m.shortest_length / denom : 1.0;
  }
  return m;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

Summary aggregate(std::span<const std::vector<EpisodeMetrics>> runs) {
  Summary s;
  s.n_runs = static_cast<int>(runs.size());
  std::vector<double> success, spl, hc, timeout;
  for (const auto& run : runs) {
    if (run.empty()) throw InputError("aggregate: run without episodes");
    double su = 0.0, sp = 0.0, h = 0.0, to = 0.0;
    for (const EpisodeMetrics& m : run) {
      su += m.success;
      sp += m.spl;
      h += m.human_collision;
      to += m.timeout;
    }
    const double n = static_cast<double>(run.size());
    success.push_back(100.0 * su / n);
    spl.push_back(sp / n);
    hc.push_back(100.0 * h / n);
    timeout.push_back(100.0 * to / n);
    s.n_episodes += static_cast<int>(run.size());
  }
  s.success_pct = mean_std(success);
  s.spl = mean_std(spl);
  s.spl_pct = {100.0 * s.spl.mean, 100.0 * s.spl.std};
  s.h_collision_pct = mean_std(hc);
  s.timeout_pct = mean_std(timeout);
  return s;
}

std::string summary_to_json(const Summary& s) {
  using Json = nlohmann::ordered_json;
  auto pct = [](const MeanStd& m) {
    return Json{{"mean", round2(m.mean)}, {"std", round2(m.std)}};
  };
  const Json j = {{"success_pct", pct(s.success_pct)},
                  {"spl_pct", pct(s.spl_pct)},
                  {"spl", {{"mean", s.spl.mean}, {"std", s.spl.std}}},
                  {"h_collision_pct", pct(s.h_collision_pct)},
                  {"timeout_pct", pct(s.timeout_pct)},
                  {"n_runs", s.n_runs},
                  {"n_episodes", s.n_episodes},
                  {"std_kind", "population"}};
  return j.dump(2);
}

void write_episode_csv(std::ostream& out, std::span<const std::vector<EpisodeMetrics>> runs) {
  out << "run,episode,success,human_collision,timeout,spl,path_length,shortest_length,steps\n";
  for (std::size_t r = 0; r < runs.size(); ++r)
    for (std::size_t e = 0; e < runs[r].size(); ++e) {
      const EpisodeMetrics& m = runs[r][e];
      out << r << ',' << e << ',' << m.success << ',' << m.human_collision << ',' << m.timeout
          << ',' << shortest_repr(m.spl) << ',' << shortest_repr(m.path_length) << ','
          << shortest_repr(m.shortest_length) << ',' << m.steps << '\n';
    }
}

}  // namespace socnav::navmetrics
