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
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "socnav/cli.hpp"
#include "socnav/error.hpp"
#include "socnav/policy/trainer.hpp"

namespace socnav::cli {

namespace fs = std::filesystem;

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

const std::vector<OptionSpec>& option_table() {
  using K = ValueKind;
  static const std::vector<OptionSpec> table = [] {
    const Json no_path = "";
    std::vector<OptionSpec> t{
        {"map", K::Path, no_path, "occupancy map file", {"generate", "simulate", "evaluate", "render"}, true},
        {"maps", K::PathList, Json::array(), "training maps, comma separated", {"train"}, true},
        {"out", K::Path, no_path, "output file or directory",
         {"generate", "simulate", "evaluate", "render", "train"}, true, false},
        {"seed", K::UInt, std::uint64_t{1}, "base seed", {"generate", "train"}},
        {"map_seed", K::UInt, nullptr, "write a procedural map with this seed to --map first", {"generate"}},
        {"n", K::Int, 10, "number of episodes", {"generate"}},
        {"pedestrians", K::Int, 3, "pedestrians per episode", {"generate", "train"}},
        {"episodes", K::Path, no_path, "episode file", {"simulate"}, true},
        {"policy", K::String, "greedy", "greedy, social or learned", {"simulate"}},
        {"checkpoint", K::Path, no_path, "checkpoint for the learned policy", {"simulate"}},
        {"deterministic", K::Bool, false, "act with the policy mean", {"simulate"}},
        {"jobs", K::Int, 1, "parallel episodes", {"simulate"}, false, false},
        {"logs", K::PathList, Json::array(), "log files or directories, one run each", {"evaluate"}, true},
        {"log", K::Path, no_path, "trajectory log; omit for the bare map", {"render"}},
        {"sim", K::Object, Json::object(), "simulation config (JSON)", {"generate", "simulate", "train"}},
        {"encounters", K::Object, Json::object(), "encounter parameters (JSON)", {"evaluate", "render"}},
        {"network", K::Object, Json::object(), "network sizes (JSON)", {"train"}},
        {"updates", K::Int, 10, "updates to run", {"train"}},
        {"envs", K::Int, 8, "parallel environments", {"train"}},
        {"rollout", K::Int, 16, "steps per environment per update", {"train"}},
        {"lr", K::Double, 3e-4, "Adam learning rate", {"train"}},
        {"gamma", K::Double, 0.99, "discount", {"train"}},
        {"grad_clip", K::Double, 0.5, "global gradient norm limit", {"train"}},
        {"checkpoint_every", K::Int, 10, "updates between checkpoints", {"train"}},
        {"resume", K::Path, no_path, "checkpoint to continue from", {"train"}},
        {"train_log", K::Path, no_path, "training CSV (default: <out>.csv)", {"train"}, false, false},
    };
    return t;
  }();
  return table;
}

std::vector<const OptionSpec*> options_for(std::string_view command) {
  std::vector<const OptionSpec*> out;
  for (const OptionSpec& s : option_table())
    if (std::find(s.commands.begin(), s.commands.end(), command) != s.commands.end())
      out.push_back(&s);
  return out;
}

std::string flag_name(std::string_view key) {
  std::string f(key);
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

std::string env_name(std::string_view key) {
  std::string e = "SOCNAV_";
  for (char c : key) e.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return e;
}

namespace {

const OptionSpec* find_spec(std::string_view key) {
  for (const OptionSpec& s : option_table())
    if (s.key == key) return &s;
  return nullptr;
}

[[noreturn]] void bad_value(std::string_view source, const std::string& what) {
  throw InputError(std::string(source) + ": " + what);
}

template <class T>
T parse_number(const std::string& text, std::string_view source, const char* kind) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    bad_value(source, std::string("expected ") + kind + ", got '" + text + "'");
  return v;
}

void check_kind(const OptionSpec& spec, const Json& v, std::string_view source) {
  bool ok = false;
  switch (spec.kind) {
    case ValueKind::Int: ok = v.is_number_integer(); break;
    case ValueKind::UInt: ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0); break;
    case ValueKind::Double: ok = v.is_number(); break;
    case ValueKind::Bool: ok = v.is_boolean(); break;
    case ValueKind::String:
    case ValueKind::Path: ok = v.is_string(); break;
    case ValueKind::PathList:
      ok = v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_string(); });
      break;
    case ValueKind::Object: ok = v.is_object(); break;
  }
  if (!ok) bad_value(source, "wrong type for '" + spec.key + "'");
}

void overlay(Json& merged, const OptionSpec& spec, const Json& v) {
  if (spec.kind == ValueKind::Object)
    merged[spec.key].merge_patch(v);
  else
    merged[spec.key] = v;
}

void require_file(const std::string& path, const char* what) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw InputError(std::string(what) + " not found: " + path);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::exception& e) {
    throw InputError("config " + path + ": " + e.what());
  }
}

int get_int(const Json& j, const char* key) { return j.at(key).get<int>(); }

void at_least(int v, int lo, const char* key) {
  if (v < lo) throw InputError(std::string(key) + " must be at least " + std::to_string(lo));
}

}  // namespace

Json parse_value(const OptionSpec& spec, const std::string& text, std::string_view source) {
  switch (spec.kind) {
    case ValueKind::Int: {
      const auto v = parse_number<std::int64_t>(text, source, "an integer");
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        bad_value(source, "integer out of range: " + text);
      return static_cast<int>(v);
    }
    case ValueKind::UInt: return parse_number<std::uint64_t>(text, source, "a non-negative integer");
    case ValueKind::Double: return parse_number<double>(text, source, "a number");
    case ValueKind::Bool: {
      std::string t = text;
      std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
      if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
      if (t == "0" || t == "false" || t == "no" || t == "off") return false;
      bad_value(source, "expected a boolean, got '" + text + "'");
    }
    case ValueKind::String:
    case ValueKind::Path: return text;
    case ValueKind::PathList: {
      Json list = Json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) list.push_back(item);
      return list;
    }
    case ValueKind::Object:
      try {
        Json v = Json::parse(text);
        if (!v.is_object()) bad_value(source, "expected a JSON object");
        return v;
      } catch (const Json::exception& e) {
        bad_value(source, e.what());
      }
  }
  bad_value(source, "unsupported option");
}

encounters::EncounterParams encounter_params_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("encounter parameters must be an object");
  encounters::EncounterParams p;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const Json& v = it.value();
      auto integer = [&](int& out) {
        if (!v.is_number_integer()) throw InputError("encounter parameter '" + k + "' must be an integer");
        out = v.get<int>();
      };
      auto real = [&](double& out) {
        if (!v.is_number()) throw InputError("encounter parameter '" + k + "' must be a number");
        out = v.get<double>();
      };
      if (k == "t_min") integer(p.t_min);
      else if (k == "d_max") real(p.d_max);
      else if (k == "t_front") integer(p.t_front);
      else if (k == "theta_max") real(p.theta_max);
      else if (k == "delta_slack") real(p.delta_slack);
      else if (k == "t_view") integer(p.t_view);
      else if (k == "t_blind") integer(p.t_blind);
      else if (k == "fov") real(p.fov);
      else if (k == "sight_range") real(p.sight_range);
      else if (k == "min_displacement") real(p.min_displacement);
      else if (k == "d_diff_max") real(p.d_diff_max);
      else throw InputError("unknown encounter parameter '" + k + "'");
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("encounter parameters: ") + e.what());
  }
  p.validate();
  return p;
}

Json encounter_params_to_json(const encounters::EncounterParams& p) {
  return {{"t_min", p.t_min},         {"d_max", p.d_max},     {"t_front", p.t_front},
          {"theta_max", p.theta_max}, {"delta_slack", p.delta_slack},
          {"t_view", p.t_view},       {"t_blind", p.t_blind}, {"fov", p.fov},
          {"sight_range", p.sight_range},
          {"min_displacement", p.min_displacement},
          {"d_diff_max", p.d_diff_max}};
}

RunConfig resolve_config(const std::string& command, const std::optional<std::string>& config_path,
                         const std::map<std::string, std::string>& flags, const EnvLookup& env) {
  const auto specs = options_for(command);
  if (specs.empty()) throw InputError("unknown command '" + command + "'");
  auto applies = [&](const OptionSpec* s) { return std::find(specs.begin(), specs.end(), s) != specs.end(); };

  Json merged = Json::object();
  for (const OptionSpec* s : specs) merged[s->key] = s->fallback;

  if (config_path) {
    const Json file = read_json_file(*config_path);
    if (!file.is_object()) throw InputError("config " + *config_path + " must be a JSON object");
    for (auto it = file.begin(); it != file.end(); ++it) {
      const OptionSpec* s = find_spec(it.key());
      if (!s) throw InputError("config " + *config_path + ": unknown key '" + it.key() + "'");
      if (!applies(s)) continue;  // shared files may carry keys for other commands
      check_kind(*s, it.value(), "config " + *config_path);
      overlay(merged, *s, it.value());
    }
  }
  for (const OptionSpec* s : specs) {
    const std::string name = env_name(s->key);
    if (auto v = env(name)) overlay(merged, *s, parse_value(*s, *v, name));
  }
  for (const auto& [key, text] : flags) {
    const OptionSpec* s = find_spec(key);
    if (!s || !applies(s)) throw InputError("option " + flag_name(key) + " does not apply to " + command);
    overlay(merged, *s, parse_value(*s, text, flag_name(key)));
  }

  for (const OptionSpec* s : specs) {
    if (!s->required) continue;
    const Json& v = merged.at(s->key);
    if ((v.is_string() && v.get<std::string>().empty()) || (v.is_array() && v.empty()))
      throw InputError("missing required option " + flag_name(s->key));
  }

  RunConfig rc;
  rc.command = command;
  auto str = [&](const char* k) { return merged.at(k).get<std::string>(); };
  auto list = [&](const char* k) { return merged.at(k).get<std::vector<std::string>>(); };
  auto has = [&](const char* k) { return merged.contains(k); };

  if (has("map_seed") && !merged.at("map_seed").is_null())
    rc.map_seed = merged.at("map_seed").get<std::uint64_t>();
  if (has("map")) {
    rc.map = str("map");
    if (!rc.map_seed) require_file(rc.map, "map");
  }
  if (has("maps")) {
    rc.maps = list("maps");
    for (const auto& m : rc.maps) require_file(m, "map");
  }
  rc.out = str("out");
  if (has("seed")) rc.seed = merged.at("seed").get<std::uint64_t>();
  if (has("n")) {
    rc.n = get_int(merged, "n");
    at_least(rc.n, 0, "n");
  }
  if (has("pedestrians")) {
    rc.pedestrians = get_int(merged, "pedestrians");
    at_least(rc.pedestrians, 0, "pedestrians");
  }
  if (has("episodes")) {
    rc.episodes = str("episodes");
    require_file(rc.episodes, "episode file");
  }
  if (has("policy")) {
    rc.policy = str("policy");
    if (rc.policy != "greedy" && rc.policy != "social" && rc.policy != "learned")
      throw InputError("policy must be greedy, social or learned, got '" + rc.policy + "'");
    rc.checkpoint = str("checkpoint");
    if (rc.policy == "learned") {
      if (rc.checkpoint.empty()) throw InputError("policy learned needs --checkpoint");
      require_file(rc.checkpoint, "checkpoint");
    }
    rc.deterministic = merged.at("deterministic").get<bool>();
  }
  if (has("jobs")) {
    rc.jobs = get_int(merged, "jobs");
    at_least(rc.jobs, 1, "jobs");
  }
  if (has("logs")) {
    rc.logs = list("logs");
    for (const auto& l : rc.logs) require_file(l, "log path");
  }
  if (has("log")) {
    rc.log = str("log");
    if (!rc.log.empty()) require_file(rc.log, "log");
  }
  if (has("sim")) {
    rc.sim = sim::config_from_json(merged.at("sim").dump());
    merged["sim"] = Json::parse(sim::config_to_json(rc.sim));
  }
  if (has("encounters")) {
    rc.encounters = encounter_params_from_json(merged.at("encounters"));
    merged["encounters"] = encounter_params_to_json(rc.encounters);
  }
  if (has("network")) {
    rc.network = policy::network_config_from_json(merged.at("network").dump());
    merged["network"] = Json::parse(policy::network_config_to_json(rc.network));
  }
  if (command == "train") {
    rc.updates = get_int(merged, "updates");
    at_least(rc.updates, 0, "updates");
    rc.envs = get_int(merged, "envs");
    rc.rollout = get_int(merged, "rollout");
    rc.lr = merged.at("lr").get<double>();
    rc.gamma = merged.at("gamma").get<double>();
    rc.grad_clip = merged.at("grad_clip").get<double>();
    rc.checkpoint_every = get_int(merged, "checkpoint_every");
    at_least(rc.checkpoint_every, 1, "checkpoint_every");
    rc.resume = str("resume");
    if (!rc.resume.empty()) require_file(rc.resume, "checkpoint");
    rc.train_log = str("train_log");
    if (rc.train_log.empty()) rc.train_log = rc.out + ".csv";
    policy::TrainerConfig tc;
    tc.envs = rc.envs;
    tc.rollout = rc.rollout;
    tc.gamma = rc.gamma;
    tc.grad_clip = rc.grad_clip;
    tc.pedestrians = rc.pedestrians;
    tc.adam.lr = rc.lr;
    tc.validate();
  }

  rc.resolved = Json::object();
  rc.resolved["command"] = command;
  for (auto it = merged.begin(); it != merged.end(); ++it)
    if (find_spec(it.key())->embedded) rc.resolved[it.key()] = it.value();
  return rc;
}

void atomic_write(const std::string& path, std::string_view text) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::vector<std::string> log_files(const std::string& path) {
  std::vector<std::string> out;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") out.push_back(entry.path().string());
    std::sort(out.begin(), out.end());
  } else {
    out.push_back(path);
  }
  return out;
}

}  // namespace socnav::cli
