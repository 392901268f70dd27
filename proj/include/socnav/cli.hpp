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
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "socnav/encounters.hpp"
#include "socnav/navmetrics.hpp"
#include "socnav/policy/network.hpp"
#include "socnav/simcore.hpp"
#include "socnav/world.hpp"

namespace socnav::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitRuntime = 2 };

using Json = nlohmann::ordered_json;

/// Returns the value of an environment variable, or nullopt when unset.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

enum class ValueKind { Int, UInt, Double, Bool, String, Path, PathList, Object };

/// One configuration key. The flag is --key with '_' spelled '-', the
/// environment override is SOCNAV_ followed by the key in upper case.
struct OptionSpec {
  std::string key;
  ValueKind kind;
  Json fallback;
  std::string help;
  std::vector<std::string> commands;
  bool required = false;
  /// Keys that only choose where or how fast output is written stay out of
  /// the embedded config, so equal inputs give equal bytes.
  bool embedded = true;
};

const std::vector<OptionSpec>& option_table();
std::vector<const OptionSpec*> options_for(std::string_view command);
std::string flag_name(std::string_view key);
std::string env_name(std::string_view key);

/// Converts flag or environment text to the JSON value of a key. Throws
/// InputError naming the source on malformed text.
Json parse_value(const OptionSpec& spec, const std::string& text, std::string_view source);

/// Everything a subcommand needs, after layering defaults, the config file,
/// SOCNAV_* variables and flags (later layers win) and re-validating.
struct RunConfig {
  std::string command;
  std::string map;
  std::optional<std::uint64_t> map_seed;
  std::vector<std::string> maps;
  std::string episodes;
  int n = 0;
  int pedestrians = 3;
  std::string policy = "greedy";
  std::string checkpoint;
  bool deterministic = false;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out;
  std::vector<std::string> logs;
  std::string log;
  sim::SimConfig sim;
  encounters::EncounterParams encounters;
  policy::NetworkConfig network;
  int updates = 10;
  int envs = 8;
  int rollout = 16;
  double lr = 3e-4;
  double gamma = 0.99;
  double grad_clip = 0.5;
  int checkpoint_every = 10;
  std::string resume;
  std::string train_log;

  /// The resolved embedded values with nested objects expanded to full form.
  Json resolved;
};

/// `flags` holds the raw text of each flag given on the command line (list
/// keys join their values with ','). Throws InputError.
RunConfig resolve_config(const std::string& command, const std::optional<std::string>& config_path,
                         const std::map<std::string, std::string>& flags, const EnvLookup& env);

encounters::EncounterParams encounter_params_from_json(const Json& j);
Json encounter_params_to_json(const encounters::EncounterParams& p);

/// Writes path.tmp and renames it over path.
void atomic_write(const std::string& path, std::string_view text);

/// Log files of one run: a directory contributes its *.jsonl files in name
/// order, a file contributes itself.
std::vector<std::string> log_files(const std::string& path);

/// Fixed-width class table plus the navigation summary.
std::string format_table(const navmetrics::Summary& summary,
                         const encounters::EncounterReport& report);

/// Top-down SVG of the map; with a log, the agent path graded by time, every
/// pedestrian path, the goal, and one highlighted span per encounter.
std::string render_svg(const world::OccupancyGrid& grid, const sim::TrajectoryLog* log,
                       const std::vector<encounters::Encounter>& encounters,
                       const std::string& metadata);

/// Entry point behind the executable. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env);

}  // namespace socnav::cli
