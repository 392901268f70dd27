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

#include <cmath>
#include <nlohmann/json.hpp>
#include <ostream>

#include "socnav/encounters.hpp"
#include "socnav/error.hpp"

namespace socnav::encounters {

namespace {

using Json = nlohmann::ordered_json;

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::vector<double> speeds(const Encounter& e, const sim::TrajectoryLog& log) {
  std::vector<double> out;
  const double v_max = log.config.physics.v_max;
  for (int t = e.t1; t <= e.t2; ++t)
    out.push_back(log.records[static_cast<std::size_t>(t)].action.lin_vel * v_max);
  return out;
}

std::vector<double> distances(const Encounter& e, const sim::TrajectoryLog& log) {
  std::vector<double> out;
  for (int t = e.t1; t <= e.t2; ++t) {
    const auto& r = log.records[static_cast<std::size_t>(t)];
    out.push_back(euclidean_distance(r.agent.position(),
                                     r.pedestrians[static_cast<std::size_t>(e.pedestrian)].position()));
  }
  return out;
}

void check(const Encounter& e, const sim::TrajectoryLog& log) {
  if (e.t1 < 0 || e.t2 < e.t1 || e.t2 >= static_cast<int>(log.records.size()) || e.pedestrian < 0 ||
      e.pedestrian >= static_cast<int>(log.records.front().pedestrians.size()))
    throw InputError("encounter does not fit its log");
}

struct Accumulator {
  int count = 0;
  int collided = 0;
  double alv = 0.0;
  double ad = 0.0;

  ClassStats finish() const {
    ClassStats s;
    s.count = count;
    s.collided = collided;
    if (count > 0) {
      s.esr = 100.0 * static_cast<double>(count - collided) / static_cast<double>(count);
      s.alv = alv / count;
      s.ad = ad / count;
    }
    return s;
  }
};

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json stats_json(const ClassStats& s) {
  return {{"count", s.count},
          {"collided", s.collided},
          {"esr", optional_number(s.esr)},
          {"alv", optional_number(s.alv)},
          {"ad", optional_number(s.ad)}};
}

}  // namespace

double encounter_alv(const Encounter& e, const sim::TrajectoryLog& log) {
  check(e, log);
  return mean(speeds(e, log));
}

double encounter_ad(const Encounter& e, const sim::TrajectoryLog& log) {
  check(e, log);
  return mean(distances(e, log));
}

std::array<double, kCurveBins> resample(std::span<const double> values) {
  std::array<double, kCurveBins> out{};
  if (values.empty()) return out;
  if (values.size() == 1) {
    out.fill(values[0]);
    return out;
  }
  const double last = static_cast<double>(values.size() - 1);
  for (int b = 0; b < kCurveBins; ++b) {
    const double x = (b + 0.5) / kCurveBins * last;
    const auto i = static_cast<std::size_t>(std::floor(x));
    const double f = x - static_cast<double>(i);
    out[static_cast<std::size_t>(b)] =
        i + 1 < values.size() ? values[i] + f * (values[i + 1] - values[i]) : values[i];
  }
  return out;
}

EncounterReport encounter_metrics(std::span<const Encounter> encounters,
                                  std::span<const sim::TrajectoryLog> logs,
                                  const EncounterParams& params) {
  EncounterReport report;
  report.params = params;
  report.v_max = logs.empty() ? 0.0 : logs.front().config.physics.v_max;
  report.total = static_cast<int>(encounters.size());
  std::array<Accumulator, 5> acc;
  Accumulator all;
  for (auto& c : report.curves)
    for (int b = 0; b < kCurveBins; ++b) c.completion[static_cast<std::size_t>(b)] = b + 0.5;

  for (const Encounter& e : encounters) {
    if (e.episode < 0 || e.episode >= static_cast<int>(logs.size()))
      throw InputError("encounter refers to a missing log");
    const sim::TrajectoryLog& log = logs[static_cast<std::size_t>(e.episode)];
    check(e, log);
    const auto v = speeds(e, log);
    const auto d = distances(e, log);
    const auto k = static_cast<std::size_t>(e.clazz);
    for (Accumulator* a : {&acc[k], &all}) {
      a->count += 1;
      a->collided += e.collided ? 1 : 0;
      a->alv += mean(v);
      a->ad += mean(d);
    }
    const auto rv = resample(v);
    const auto rd = resample(d);
    for (std::size_t b = 0; b < kCurveBins; ++b) {
      report.curves[k].alv[b] += rv[b];
      report.curves[k].ad[b] += rd[b];
    }
  }
  for (std::size_t k = 0; k < acc.size(); ++k) {
    report.per_class[k] = acc[k].finish();
    if (acc[k].count == 0) continue;
    for (std::size_t b = 0; b < kCurveBins; ++b) {
      report.curves[k].alv[b] /= acc[k].count;
      report.curves[k].ad[b] /= acc[k].count;
    }
  }
  report.overall = all.finish();
  return report;
}

std::string report_to_json(const EncounterReport& report) {
  const EncounterParams& p = report.params;
  Json params = {{"t_min", p.t_min},
                 {"d_max", p.d_max},
                 {"t_front", p.t_front},
                 {"theta_max", p.theta_max},
                 {"delta_slack", p.delta_slack},
                 {"t_view", p.t_view},
                 {"t_blind", p.t_blind},
                 {"fov", p.fov},
                 {"sight_range", p.sight_range},
                 {"min_displacement", p.min_displacement},
                 {"d_diff_max", p.d_diff_max},
                 {"v_max", report.v_max},
                 {"alv_unit", "m/s"}};
  Json per_class = Json::object();
  Json curves = Json::object();
  for (EncounterClass c : kAllClasses) {
    const auto k = static_cast<std::size_t>(c);
    const std::string name(to_string(c));
    per_class[name] = stats_json(report.per_class[k]);
    const Curves& cv = report.curves[k];
    curves[name] = {{"bins", cv.completion}, {"alv", cv.alv}, {"ad", cv.ad}};
  }
  Json j = {{"params", params},
            {"total", report.total},
            {"per_class", per_class},
            {"overall", stats_json(report.overall)},
            {"curves", curves}};
  return j.dump(2);
}

void write_curves_csv(std::ostream& out, const EncounterReport& report) {
  out << "class,bin,completion_pct,alv,ad\n";
  for (EncounterClass c : kAllClasses) {
    const Curves& cv = report.curves[static_cast<std::size_t>(c)];
    for (std::size_t b = 0; b < kCurveBins; ++b)
      out << to_string(c) << ',' << b << ',' << cv.completion[b] << ',' << cv.alv[b] << ','
          << cv.ad[b] << '\n';
  }
}

}  // namespace socnav::encounters
