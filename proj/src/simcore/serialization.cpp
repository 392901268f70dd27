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

#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "socnav/error.hpp"
#include "socnav/simcore.hpp"

namespace socnav::sim {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kLogFormat = "socnav.trajectory";
constexpr int kLogVersion = 1;

Json point_json(Vec2 p) { return {{"x", p.x}, {"y", p.y}}; }
Json pose_json(const Pose& p) { return {{"x", p.x()}, {"y", p.y()}, {"theta", p.theta()}}; }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw InputError(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

bool boolean(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_boolean()) throw InputError(std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

Vec2 point_from(const Json& j) { return {number(j, "x"), number(j, "y")}; }
Pose pose_from(const Json& j) { return Pose(number(j, "x"), number(j, "y"), number(j, "theta")); }

Json episode_json(const Episode& e) {
  Json peds = Json::array();
  for (const PedestrianSpec& p : e.pedestrians)
    peds.push_back({{"start", point_json(p.start)},
                    {"end", point_json(p.end)},
                    {"speed", p.speed},
                    {"phase", p.phase}});
  return {{"map_id", e.map_id},
          {"agent_start", pose_json(e.agent_start)},
          {"goal", point_json(e.goal)},
          {"pedestrians", peds},
          {"seed", e.seed}};
}

Episode episode_from(const Json& j) {
  Episode e;
  const Json& id = field(j, "map_id");
  if (!id.is_string()) throw InputError("map_id must be a string");
  e.map_id = id.get<std::string>();
  e.agent_start = pose_from(field(j, "agent_start"));
  e.goal = point_from(field(j, "goal"));
  const Json& peds = field(j, "pedestrians");
  if (!peds.is_array()) throw InputError("pedestrians must be an array");
  for (const Json& p : peds)
    e.pedestrians.push_back({point_from(field(p, "start")), point_from(field(p, "end")),
                             number(p, "speed"), number(p, "phase")});
  const Json& seed = field(j, "seed");
  if (!seed.is_number_unsigned())
    throw InputError("seed must be a non-negative integer");
  e.seed = seed.get<std::uint64_t>();
  return e;
}

Json config_json(const SimConfig& c) {
  const PhysicsConfig& p = c.physics;
  return {{"dt", p.dt},
          {"v_max", p.v_max},
          {"w_max", p.w_max},
          {"agent_radius", p.agent_radius},
          {"human_radius", p.human_radius},
          {"goal_radius", p.goal_radius},
          {"max_steps", p.max_steps},
          {"reward",
           {{"slack", c.reward.slack},
            {"collision_backward", c.reward.collision_backward},
            {"success_bonus", c.reward.success_bonus}}},
          {"features",
           {{"risk_radius", c.features.risk_radius},
            {"compass_radius", c.features.compass_radius},
            {"sectors", c.features.sectors}}}};
}

void assign(const Json& j, const char* key, double& out) {
  if (j.contains(key)) out = number(j, key);
}

void assign(const Json& j, const char* key, int& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw InputError(std::string("field '") + key + "' must be an integer");
  out = v.get<int>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* where) {
  if (!j.is_object()) throw InputError(std::string(where) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok |= it.key() == k;
    if (!ok) throw InputError(std::string("unknown key '") + it.key() + "' in " + where);
  }
}

SimConfig config_from(const Json& j) {
  reject_unknown(j, {"dt", "v_max", "w_max", "agent_radius", "human_radius", "goal_radius",
                     "max_steps", "reward", "features"},
                 "simulation config");
  SimConfig c;
  assign(j, "dt", c.physics.dt);
  assign(j, "v_max", c.physics.v_max);
  assign(j, "w_max", c.physics.w_max);
  assign(j, "agent_radius", c.physics.agent_radius);
  assign(j, "human_radius", c.physics.human_radius);
  assign(j, "goal_radius", c.physics.goal_radius);
  assign(j, "max_steps", c.physics.max_steps);
  if (j.contains("reward")) {
    const Json& r = j.at("reward");
    reject_unknown(r, {"slack", "collision_backward", "success_bonus"}, "reward config");
    assign(r, "slack", c.reward.slack);
    assign(r, "collision_backward", c.reward.collision_backward);
    assign(r, "success_bonus", c.reward.success_bonus);
  }
  if (j.contains("features")) {
    const Json& f = j.at("features");
    reject_unknown(f, {"risk_radius", "compass_radius", "sectors"}, "feature config");
    assign(f, "risk_radius", c.features.risk_radius);
    assign(f, "compass_radius", c.features.compass_radius);
    assign(f, "sectors", c.features.sectors);
  }
  c.validate();
  return c;
}

Json record_json(const StepRecord& r) {
  Json peds = Json::array();
  for (const Pose& p : r.pedestrians) peds.push_back(pose_json(p));
  const StepOutcome& o = r.outcome;
  Json j = {{"type", "step"},
            {"t", r.t},
            {"agent", pose_json(r.agent)},
            {"action", {{"lin_vel", r.action.lin_vel}, {"ang_vel", r.action.ang_vel}}},
            {"pedestrians", peds},
            {"reward", o.reward},
            {"terms",
             {{"progress", o.terms.progress},
              {"slack", o.terms.slack},
              {"collision", o.terms.collision},
              {"success", o.terms.success}}},
            {"flags",
             {{"coll", o.coll},
              {"back", o.back},
              {"succ", o.succ},
              {"human_coll", o.human_coll},
              {"geodesic_unavailable", o.geodesic_unavailable}}},
            {"human_id", o.human_id}};
  if (r.features) j["features"] = {{"risk", r.features->risk}, {"compass", r.features->compass}};
  return j;
}

StepRecord record_from(const Json& j) {
  StepRecord r;
  const Json& t = field(j, "t");
  if (!t.is_number_integer()) throw InputError("record t must be an integer");
  r.t = t.get<int>();
  r.agent = pose_from(field(j, "agent"));
  const Json& a = field(j, "action");
  r.action = {number(a, "lin_vel"), number(a, "ang_vel")};
  const Json& peds = field(j, "pedestrians");
  if (!peds.is_array()) throw InputError("record pedestrians must be an array");
  for (const Json& p : peds) r.pedestrians.push_back(pose_from(p));
  StepOutcome& o = r.outcome;
  o.reward = number(j, "reward");
  const Json& terms = field(j, "terms");
  o.terms = {number(terms, "progress"), number(terms, "slack"), number(terms, "collision"),
             number(terms, "success")};
  const Json& flags = field(j, "flags");
  o.coll = boolean(flags, "coll");
  o.back = boolean(flags, "back");
  o.succ = boolean(flags, "succ");
  o.human_coll = boolean(flags, "human_coll");
  o.geodesic_unavailable = boolean(flags, "geodesic_unavailable");
  const Json& id = field(j, "human_id");
  if (!id.is_number_integer()) throw InputError("human_id must be an integer");
  o.human_id = id.get<int>();
  if (j.contains("features")) {
    const Json& f = j.at("features");
    social::SocialFeatures sf;
    sf.risk = number(f, "risk");
    const Json& c = field(f, "compass");
    if (!c.is_array()) throw InputError("compass must be an array");
    for (const Json& v : c) {
      if (!v.is_number()) throw InputError("compass entries must be numbers");
      sf.compass.push_back(v.get<double>());
    }
    r.features = std::move(sf);
  }
  return r;
}

Json parse(std::string_view text, const char* what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

template <typename F>
auto wrap_errors(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string episode_to_json(const Episode& episode) { return episode_json(episode).dump(); }

Episode episode_from_json(std::string_view text) {
  const Json j = parse(text, "episode");
  return wrap_errors("episode", [&] { return episode_from(j); });
}

std::vector<Episode> read_episodes(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  const Json j = parse(ss.str(), "episodes");
  return wrap_errors("episodes", [&] {
    std::vector<Episode> out;
    const Json* list = &j;
    if (j.is_object() && j.contains("episodes")) list = &j.at("episodes");
    if (list->is_array()) {
      for (const Json& e : *list) out.push_back(episode_from(e));
    } else {
      out.push_back(episode_from(*list));
    }
    return out;
  });
}

void write_episodes(std::ostream& out, std::span<const Episode> episodes) {
  Json list = Json::array();
  for (const Episode& e : episodes) list.push_back(episode_json(e));
  out << Json{{"episodes", list}}.dump(2) << '\n';
}

std::string config_to_json(const SimConfig& config) { return config_json(config).dump(); }

SimConfig config_from_json(std::string_view text) {
  const Json j = parse(text, "config");
  return wrap_errors("config", [&] { return config_from(j); });
}

void write_log(std::ostream& out, const TrajectoryLog& log) {
  out << Json{{"type", "header"},
              {"format", kLogFormat},
              {"version", kLogVersion},
              {"config", config_json(log.config)},
              {"episode", episode_json(log.episode)}}
             .dump()
      << '\n';
  for (const StepRecord& r : log.records) out << record_json(r).dump() << '\n';
  out << Json{{"type", "summary"}, {"status", to_string(log.status)}, {"t_end", log.t_end}}.dump()
      << '\n';
}

TrajectoryLog read_log(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  bool have_summary = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (have_summary) throw InputError("log: content after the summary line");
    const Json j = parse(line, ("log line " + std::to_string(line_no)).c_str());
    wrap_errors("log", [&] {
      const Json& type = field(j, "type");
      if (type == "header") {
        if (have_header) throw InputError("log: duplicate header");
        if (field(j, "format") != kLogFormat) throw InputError("log: unknown format");
        if (field(j, "version") != kLogVersion) throw InputError("log: unsupported version");
        log.config = config_from(field(j, "config"));
        log.episode = episode_from(field(j, "episode"));
        have_header = true;
      } else if (type == "step") {
        if (!have_header) throw InputError("log: record before header");
        log.records.push_back(record_from(j));
      } else if (type == "summary") {
        log.status = status_from_string(field(j, "status").get<std::string>());
        const Json& t_end = field(j, "t_end");
        if (!t_end.is_number_integer()) throw InputError("log: t_end must be an integer");
        log.t_end = t_end.get<int>();
        have_summary = true;
      } else {
        throw InputError("log: unknown line type");
      }
      return 0;
    });
  }
  if (!have_header || !have_summary) throw InputError("log: missing header or summary");
  if (log.records.size() != static_cast<std::size_t>(log.t_end) + 1)
    throw InputError("log: record count does not match t_end");
  for (std::size_t i = 0; i < log.records.size(); ++i)
    if (log.records[i].t != static_cast<int>(i)) throw InputError("log: records out of order");
  if (log.status == Status::Running) throw InputError("log: episode did not terminate");
  return log;
}

TrajectoryLog read_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open log '" + path + "'");
  return read_log(in);
}

}  // namespace socnav::sim
