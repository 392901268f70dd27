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

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "socnav/cli.hpp"
#include "socnav/error.hpp"
#include "socnav/policy.hpp"

namespace socnav::cli {

namespace fs = std::filesystem;

namespace {

struct Command {
  const char* name;
  const char* help;
};

constexpr std::array<Command, 5> kCommands{{
    {"generate", "sample episodes on a map"},
    {"simulate", "roll out a policy on every episode of a file"},
    {"evaluate", "navigation metrics and encounter report for trajectory logs"},
    {"render", "SVG of a map and optionally one trajectory log"},
    {"train", "advantage actor-critic training with auxiliary tasks"},
}};

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::string log_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "episode_%05zu.jsonl", i);
  return buf;
}

int cmd_generate(const RunConfig& rc, std::ostream& out) {
  world::OccupancyGrid grid;
  if (rc.map_seed) {
    grid = world::generate_map(*rc.map_seed);
    ensure_parent(rc.map);
    atomic_write(rc.map, world::map_to_string(grid));
  } else {
    grid = world::read_map_file(rc.map);
  }
  const std::string map_id = fs::path(rc.map).stem().string();
  const auto episodes = sim::generate_episodes(grid, rc.n, rc.seed, rc.pedestrians, rc.sim, {}, map_id);
  Json list = Json::array();
  for (const auto& e : episodes) {
    sim::validate_episode(grid, e, rc.sim);
    list.push_back(Json::parse(sim::episode_to_json(e)));
  }
  Json doc = {{"run", rc.resolved}, {"episodes", list}};
  ensure_parent(rc.out);
  atomic_write(rc.out, doc.dump(2) + "\n");
  out << "wrote " << episodes.size() << " episode(s) to " << rc.out << '\n';
  return kExitOk;
}

int cmd_simulate(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const world::OccupancyGrid grid = world::read_map_file(rc.map);
  std::ifstream in(rc.episodes, std::ios::binary);
  const std::vector<sim::Episode> episodes = sim::read_episodes(in);

  std::optional<policy::Network> net;
  policy::ObservationConfig obs;
  if (rc.policy == "learned") {
    const policy::Checkpoint ck = policy::load_checkpoint(rc.checkpoint);
    net.emplace(policy::network_from(ck));
    obs = ck.observation;
  }
  auto make_policy = [&]() -> std::unique_ptr<sim::Policy> {
    if (rc.policy == "greedy") return std::make_unique<policy::GreedyPolicy>();
    if (rc.policy == "social") return std::make_unique<policy::SocialPolicy>();
    return std::make_unique<policy::LearnedPolicy>(*net, obs, rc.deterministic);
  };

  fs::create_directories(rc.out);
  std::vector<std::string> failures(episodes.size());
  std::vector<std::string> statuses(episodes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < episodes.size(); i = next++) {
      try {
        auto p = make_policy();
        const sim::TrajectoryLog log = sim::run_episode(grid, episodes[i], *p, rc.sim);
        std::ostringstream os;
        sim::write_log(os, log);
        atomic_write((fs::path(rc.out) / log_name(i)).string(), os.str());
        statuses[i] = std::string(to_string(log.status));
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::min<int>(rc.jobs, std::max<int>(1, static_cast<int>(episodes.size())));
    for (int j = 1; j < n; ++j) pool.emplace_back(worker);
    worker();
  }

  Json files = Json::array();
  Json failed = Json::array();
  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    if (failures[i].empty()) {
      files.push_back(log_name(i));
      ++counts[statuses[i]];
    } else {
      failed.push_back({{"episode", i}, {"error", failures[i]}});
      err << "episode " << i << ": " << failures[i] << '\n';
    }
  }
  Json manifest = {{"run", rc.resolved}, {"logs", files}, {"failed", failed}};
  atomic_write((fs::path(rc.out) / "run.json").string(), manifest.dump(2) + "\n");
  out << "simulated " << files.size() << " of " << episodes.size() << " episode(s)";
  for (const auto& [status, c] : counts) out << ", " << status << ' ' << c;
  out << '\n';
  return failed.empty() ? kExitOk : kExitRuntime;
}

int cmd_evaluate(const RunConfig& rc, std::ostream& out) {
  const world::OccupancyGrid grid = world::read_map_file(rc.map);
  std::vector<sim::TrajectoryLog> logs;
  std::vector<std::string> names;
  std::vector<std::vector<navmetrics::EpisodeMetrics>> runs;
  for (const std::string& path : rc.logs) {
    auto& run = runs.emplace_back();
    for (const std::string& f : log_files(path)) {
      logs.push_back(sim::read_log_file(f));
      names.push_back(f);
      run.push_back(navmetrics::episode_metrics(logs.back(), grid));
    }
  }
  std::vector<encounters::Encounter> found;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    auto e = encounters::analyze_log(logs[i], grid, rc.encounters, static_cast<int>(i));
    found.insert(found.end(), e.begin(), e.end());
  }
  const encounters::EncounterReport report = encounters::encounter_metrics(found, logs, rc.encounters);

  navmetrics::Summary summary;
  if (!logs.empty()) {
    for (std::size_t r = 0; r < runs.size(); ++r)
      if (runs[r].empty()) throw InputError("no logs in " + rc.logs[r]);
    summary = navmetrics::aggregate(runs);
  }

  fs::create_directories(rc.out);
  const fs::path dir(rc.out);
  Json doc = {{"run", rc.resolved},
              {"navmetrics", Json::parse(navmetrics::summary_to_json(summary))},
              {"encounters", Json::parse(encounters::report_to_json(report))}};
  atomic_write((dir / "summary.json").string(), doc.dump(2) + "\n");

  std::ostringstream episodes_csv;
  navmetrics::write_episode_csv(episodes_csv, runs);
  atomic_write((dir / "episodes.csv").string(), episodes_csv.str());

  std::ostringstream curves_csv;
  encounters::write_curves_csv(curves_csv, report);
  atomic_write((dir / "curves.csv").string(), curves_csv.str());

  std::ostringstream enc_csv;
  enc_csv << "episode,log,pedestrian,t1,t2,class,collided\n";
  for (const auto& e : found)
    enc_csv << e.episode << ',' << names[static_cast<std::size_t>(e.episode)] << ',' << e.pedestrian << ','
            << e.t1 << ',' << e.t2 << ',' << to_string(e.clazz) << ',' << (e.collided ? 1 : 0) << '\n';
  atomic_write((dir / "encounters.csv").string(), enc_csv.str());

  const std::string table = format_table(summary, report);
  atomic_write((dir / "table.txt").string(), table);
  out << table;
  return kExitOk;
}

int cmd_render(const RunConfig& rc, std::ostream& out) {
  const world::OccupancyGrid grid = world::read_map_file(rc.map);
  std::optional<sim::TrajectoryLog> log;
  std::vector<encounters::Encounter> found;
  if (!rc.log.empty()) {
    log = sim::read_log_file(rc.log);
    found = encounters::analyze_log(*log, grid, rc.encounters);
  }
  ensure_parent(rc.out);
  atomic_write(rc.out, render_svg(grid, log ? &*log : nullptr, found, rc.resolved.dump()));
  out << "wrote " << rc.out << '\n';
  return kExitOk;
}

// Keeps the rows at or below `updates` so a resumed log has no duplicates.
void trim_training_log(const std::string& path, int updates) {
  std::ifstream in(path);
  std::string header, line, kept;
  if (!std::getline(in, header)) return;
  kept = header + "\n";
  while (std::getline(in, line)) {
    int u = 0;
    if (std::sscanf(line.c_str(), "%d,", &u) == 1 && u <= updates) kept += line + "\n";
  }
  in.close();
  atomic_write(path, kept);
}

int cmd_train(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  std::vector<world::OccupancyGrid> maps;
  for (const auto& m : rc.maps) maps.push_back(world::read_map_file(m));

  std::optional<policy::Checkpoint> resumed;
  if (!rc.resume.empty()) resumed = policy::load_checkpoint(rc.resume);

  std::uint64_t seed = rc.seed;
  policy::ObservationConfig obs;
  std::optional<policy::Network> net;
  if (resumed) {
    // Later updates depend on the original seed, so the checkpoint's wins.
    seed = resumed->seed;
    obs = resumed->observation;
    net.emplace(policy::network_from(*resumed));
  } else {
    obs.rays = rc.network.rays;
    net.emplace(rc.network);
    Rng rng(seed);
    net->initialize(rng);
  }

  policy::TrainerConfig tc;
  tc.envs = rc.envs;
  tc.rollout = rc.rollout;
  tc.gamma = rc.gamma;
  tc.grad_clip = rc.grad_clip;
  tc.pedestrians = rc.pedestrians;
  tc.seed = seed;
  tc.adam.lr = rc.lr;
  policy::Trainer trainer(*net, std::move(maps), rc.sim, tc, obs);
  if (resumed) trainer.restore(resumed->updates, resumed->adam);

  Json run = rc.resolved;
  run["seed"] = seed;
  auto save = [&] {
    policy::Checkpoint ck{net->config(), obs, net->params(), trainer.adam(), trainer.updates_done(), seed};
    Json j = Json::parse(policy::checkpoint_to_json(ck));
    j["run"] = run;
    atomic_write(rc.out, j.dump() + "\n");
  };

  ensure_parent(rc.out);
  ensure_parent(rc.train_log);
  const bool append = resumed && fs::exists(rc.train_log);
  if (append) trim_training_log(rc.train_log, trainer.updates_done());
  std::ofstream csv(rc.train_log, append ? std::ios::app : std::ios::trunc);
  if (!csv) throw InputError("cannot write " + rc.train_log);
  if (!append) policy::write_training_header(csv);
  csv.flush();

  if (!resumed) save();
  try {
    for (int i = 1; i <= rc.updates; ++i) {
      const policy::TrainingRow row = trainer.update();
      policy::write_training_row(csv, row);
      csv.flush();
      if (trainer.updates_done() % rc.checkpoint_every == 0 || i == rc.updates) save();
    }
  } catch (const TrainingDiverged& e) {
    err << e.what() << "; last checkpoint left at " << rc.out << '\n';
    return kExitRuntime;
  }
  out << "trained to update " << trainer.updates_done() << ", checkpoint " << rc.out << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app("Social navigation simulator and encounter analysis", "socnav");
  app.require_subcommand(1);

  struct Parsed {
    CLI::App* sub = nullptr;
    std::string config;
    std::map<std::string, std::string> text;
    std::map<std::string, std::vector<std::string>> lists;
    std::map<std::string, std::string> bools;
    std::vector<std::pair<const OptionSpec*, CLI::Option*>> options;
  };
  std::vector<Parsed> parsed(kCommands.size());
  for (std::size_t c = 0; c < kCommands.size(); ++c) {
    Parsed& p = parsed[c];
    p.sub = app.add_subcommand(kCommands[c].name, kCommands[c].help);
    p.sub->add_option("--config", p.config, "JSON config file (also " + env_name("config") + ")");
    for (const OptionSpec* s : options_for(kCommands[c].name)) {
      const std::string flag = flag_name(s->key);
      const std::string help = s->help + " [" + env_name(s->key) + "]";
      CLI::Option* o = nullptr;
      if (s->kind == ValueKind::PathList) {
        o = p.sub->add_option(flag, p.lists[s->key], help)->delimiter(',');
      } else if (s->kind == ValueKind::Bool) {
        std::string& slot = p.bools[s->key];
        o = p.sub->add_flag_function(flag, [&slot](std::int64_t n) { slot = n > 0 ? "true" : "false"; }, help);
      } else {
        o = p.sub->add_option(flag, p.text[s->key], help);
      }
      p.options.emplace_back(s, o);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (std::size_t c = 0; c < kCommands.size(); ++c) {
    const Parsed& p = parsed[c];
    if (!p.sub->parsed()) continue;
    const std::string command = kCommands[c].name;
    try {
      std::map<std::string, std::string> flags;
      for (const auto& [spec, opt] : p.options) {
        if (opt->count() == 0) continue;
        if (spec->kind == ValueKind::PathList) {
          std::string joined;
          for (const auto& v : p.lists.at(spec->key)) joined += (joined.empty() ? "" : ",") + v;
          flags[spec->key] = joined;
        } else if (spec->kind == ValueKind::Bool) {
          flags[spec->key] = p.bools.at(spec->key);
        } else {
          flags[spec->key] = p.text.at(spec->key);
        }
      }
      std::optional<std::string> config_path;
      if (!p.config.empty()) config_path = p.config;
      else if (auto v = env(env_name("config"))) config_path = *v;
      const RunConfig rc = resolve_config(command, config_path, flags, env);
      if (command == "generate") return cmd_generate(rc, out);
      if (command == "simulate") return cmd_simulate(rc, out, err);
      if (command == "evaluate") return cmd_evaluate(rc, out);
      if (command == "render") return cmd_render(rc, out);
      return cmd_train(rc, out, err);
    } catch (const InputError& e) {
      err << "socnav " << command << ": " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "socnav " << command << ": " << e.what() << '\n';
      return kExitRuntime;
    }
  }
  return kExitUsage;
}

}  // namespace socnav::cli
