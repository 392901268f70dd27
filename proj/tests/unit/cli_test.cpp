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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "scenarios.hpp"
#include "socnav/cli.hpp"
#include "socnav/error.hpp"
#include "socnav/policy.hpp"

namespace socnav::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

EnvLookup fake_env(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& k) -> std::optional<std::string> {
    auto it = vars.find(k);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("socnav_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Result call(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
    std::ostringstream out, err;
    Result r;
    r.code = run(args, out, err, fake_env(std::move(env)));
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  // Map plus episodes, returns the episode file.
  std::string prepare(int n, std::uint64_t seed = 3) {
    const auto r = call({"generate", "--map", path("map.txt"), "--map-seed", "500", "--n", std::to_string(n),
                         "--seed", std::to_string(seed), "--out", path("eps.json")});
    EXPECT_EQ(r.code, 0) << r.err;
    return path("eps.json");
  }

  fs::path dir_;
};

TEST(CliOptions, NamesAndParsing) {
  EXPECT_EQ(flag_name("grad_clip"), "--grad-clip");
  EXPECT_EQ(env_name("grad_clip"), "SOCNAV_GRAD_CLIP");
  const OptionSpec* jobs = nullptr;
  const OptionSpec* logs = nullptr;
  const OptionSpec* det = nullptr;
  for (const auto& s : option_table()) {
    if (s.key == "jobs") jobs = &s;
    if (s.key == "logs") logs = &s;
    if (s.key == "deterministic") det = &s;
  }
  ASSERT_TRUE(jobs && logs && det);
  EXPECT_EQ(parse_value(*jobs, "4", "--jobs"), 4);
  EXPECT_THROW(parse_value(*jobs, "4x", "--jobs"), InputError);
  EXPECT_THROW(parse_value(*jobs, "", "--jobs"), InputError);
  EXPECT_THROW(parse_value(*jobs, "99999999999", "--jobs"), InputError);
  EXPECT_EQ(parse_value(*logs, "a,b,,c", "--logs"), Json({"a", "b", "c"}));
  EXPECT_EQ(parse_value(*det, "Yes", "x"), true);
  EXPECT_EQ(parse_value(*det, "0", "x"), false);
  EXPECT_THROW(parse_value(*det, "maybe", "x"), InputError);
  // Every key maps to at least one subcommand.
  for (const auto& s : option_table()) EXPECT_FALSE(s.commands.empty()) << s.key;
}

TEST_F(CliTest, LayersFileThenEnvThenFlags) {
  prepare(1);
  spit(path("cfg.json"), R"({"jobs": 2, "policy": "social", "sim": {"max_steps": 50}, "n": 7})");
  const std::map<std::string, std::string> flags{
      {"map", path("map.txt")}, {"episodes", path("eps.json")}, {"out", path("o")}};

  auto rc = resolve_config("simulate", path("cfg.json"), flags, fake_env({}));
  EXPECT_EQ(rc.jobs, 2);
  EXPECT_EQ(rc.policy, "social");
  EXPECT_EQ(rc.sim.physics.max_steps, 50);
  EXPECT_EQ(rc.sim.physics.dt, sim::PhysicsConfig{}.dt);  // nested objects merge

  rc = resolve_config("simulate", path("cfg.json"), flags, fake_env({{"SOCNAV_JOBS", "3"}, {"SOCNAV_POLICY", "greedy"}}));
  EXPECT_EQ(rc.jobs, 3);
  EXPECT_EQ(rc.policy, "greedy");

  auto with_flag = flags;
  with_flag["jobs"] = "5";
  rc = resolve_config("simulate", path("cfg.json"), with_flag, fake_env({{"SOCNAV_JOBS", "3"}}));
  EXPECT_EQ(rc.jobs, 5);
  // Location-only keys stay out of the embedded config.
  EXPECT_FALSE(rc.resolved.contains("jobs"));
  EXPECT_FALSE(rc.resolved.contains("out"));
  EXPECT_EQ(rc.resolved.at("sim").at("max_steps"), 50);
}

TEST_F(CliTest, RejectsBadConfigs) {
  prepare(1);
  const std::map<std::string, std::string> flags{
      {"map", path("map.txt")}, {"episodes", path("eps.json")}, {"out", path("o")}};
  spit(path("typo.json"), R"({"jbos": 2})");
  EXPECT_THROW(resolve_config("simulate", path("typo.json"), flags, fake_env({})), InputError);
  spit(path("type.json"), R"({"jobs": "two"})");
  EXPECT_THROW(resolve_config("simulate", path("type.json"), flags, fake_env({})), InputError);
  spit(path("sim.json"), R"({"sim": {"dt": -1}})");
  EXPECT_THROW(resolve_config("simulate", path("sim.json"), flags, fake_env({})), InputError);
  spit(path("broken.json"), "{");
  EXPECT_THROW(resolve_config("simulate", path("broken.json"), flags, fake_env({})), InputError);
  EXPECT_THROW(resolve_config("simulate", path("missing.json"), flags, fake_env({})), InputError);
  EXPECT_THROW(resolve_config("simulate", std::nullopt, flags, fake_env({{"SOCNAV_JOBS", "0"}})), InputError);
  auto learned = flags;
  learned["policy"] = "learned";
  EXPECT_THROW(resolve_config("simulate", std::nullopt, learned, fake_env({})), InputError);

  const auto r = call({"simulate", "--config", path("typo.json"), "--map", path("map.txt"), "--episodes",
                       path("eps.json"), "--out", path("o")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("jbos"), std::string::npos);
  EXPECT_EQ(call({"simulate", "--map", path("map.txt"), "--out", path("o")}).code, kExitUsage);
  EXPECT_EQ(call({"no-such-command"}).code, kExitUsage);
  EXPECT_EQ(call({"--help"}).code, kExitOk);
}

TEST_F(CliTest, GenerateIsDeterministicAndValid) {
  const auto a = call({"generate", "--map", path("map.txt"), "--map-seed", "500", "--n", "5", "--seed", "9",
                       "--out", path("a.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = call({"generate", "--map", path("map.txt"), "--n", "5", "--seed", "9", "--out", path("b.json")});
  ASSERT_EQ(b.code, 0) << b.err;
  const std::string text = slurp(path("a.json"));
  // The second run read the map the first one wrote; the embedded map_seed differs.
  const std::string other = slurp(path("b.json"));
  EXPECT_EQ(text.substr(text.find("\"episodes\"")), other.substr(other.find("\"episodes\"")));
  ASSERT_EQ(call({"generate", "--map", path("map.txt"), "--n", "5", "--seed", "9", "--out", path("c.json")}).code, 0);
  EXPECT_EQ(slurp(path("b.json")), slurp(path("c.json")));

  std::ifstream in(path("a.json"));
  const auto episodes = sim::read_episodes(in);
  ASSERT_EQ(episodes.size(), 5u);
  const auto grid = world::read_map_file(path("map.txt"));
  EXPECT_EQ(grid, world::generate_map(500));
  for (const auto& e : episodes) {
    EXPECT_NO_THROW(sim::validate_episode(grid, e, {}));
    EXPECT_EQ(e.pedestrians.size(), 3u);
    EXPECT_EQ(e.map_id, "map");
  }
  EXPECT_EQ(Json::parse(text).at("run").at("seed"), 9);

  ASSERT_EQ(call({"generate", "--map", path("map.txt"), "--n", "0", "--out", path("empty.json")}).code, 0);
  std::ifstream empty(path("empty.json"));
  EXPECT_TRUE(sim::read_episodes(empty).empty());
}

TEST_F(CliTest, SimulateParallelMatchesSerial) {
  const std::string eps = prepare(8);
  for (const char* policy : {"greedy", "social"}) {
    const auto s = call({"simulate", "--map", path("map.txt"), "--episodes", eps, "--policy", policy, "--out",
                         path(std::string("serial_") + policy)});
    const auto p = call({"simulate", "--map", path("map.txt"), "--episodes", eps, "--policy", policy, "--jobs",
                         "4", "--out", path(std::string("par_") + policy)});
    ASSERT_EQ(s.code, 0) << s.err;
    ASSERT_EQ(p.code, 0) << p.err;
    const auto files = log_files(path(std::string("serial_") + policy));
    ASSERT_EQ(files.size(), 8u);
    for (const auto& f : files) {
      const fs::path name = fs::path(f).filename();
      EXPECT_EQ(slurp(f), slurp(dir_ / (std::string("par_") + policy) / name)) << name;
      EXPECT_NO_THROW(sim::read_log_file(f));
      EXPECT_FALSE(fs::exists(f + ".tmp"));
    }
    EXPECT_EQ(slurp(dir_ / (std::string("serial_") + policy) / "run.json"),
              slurp(dir_ / (std::string("par_") + policy) / "run.json"));
  }
}

TEST_F(CliTest, SimulateReportsFailedEpisodes) {
  const std::string eps = prepare(2);
  std::ifstream in(eps);
  auto episodes = sim::read_episodes(in);
  episodes[1].goal = {-5.0, -5.0};  // off the map
  std::ostringstream os;
  sim::write_episodes(os, episodes);
  spit(path("bad.json"), os.str());
  const auto r = call({"simulate", "--map", path("map.txt"), "--episodes", path("bad.json"), "--out", path("o")});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("episode 1"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "episode_00000.jsonl"));
  EXPECT_EQ(Json::parse(slurp(dir_ / "o" / "run.json")).at("failed").size(), 1u);
}

TEST_F(CliTest, EvaluateEmptySetIsZeroed) {
  prepare(0);
  fs::create_directories(dir_ / "none");
  const auto r = call({"evaluate", "--map", path("map.txt"), "--logs", path("none"), "--out", path("ev")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(slurp(dir_ / "ev" / "summary.json"));
  EXPECT_EQ(doc.at("navmetrics").at("n_episodes"), 0);
  EXPECT_EQ(doc.at("encounters").at("total"), 0);
  EXPECT_TRUE(doc.at("encounters").at("overall").at("esr").is_null());
  EXPECT_NE(r.out.find("0 episode(s)"), std::string::npos);
}

TEST_F(CliTest, EvaluateTwoCollisionsInTenEncounters) {
  const auto set = scenarios::head_on_log_set(2);
  spit(path("corridor.txt"), world::map_to_string(set.grid));
  fs::create_directories(dir_ / "logs");
  for (std::size_t i = 0; i < set.logs.size(); ++i) {
    std::ostringstream os;
    sim::write_log(os, set.logs[i]);
    spit(dir_ / "logs" / ("log_" + std::to_string(i) + ".jsonl"), os.str());
  }
  const auto r = call({"evaluate", "--map", path("corridor.txt"), "--logs", path("logs"), "--out", path("ev")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(slurp(dir_ / "ev" / "summary.json"));
  const Json& frontal = doc.at("encounters").at("per_class").at("FrontalApproach");
  EXPECT_EQ(frontal.at("count"), 10);
  EXPECT_EQ(frontal.at("collided"), 2);
  EXPECT_EQ(frontal.at("esr").get<double>(), 80.0);
  EXPECT_TRUE(std::regex_search(r.out, std::regex(R"(FrontalApproach\s+10\s+2\s+80\.00)"))) << r.out;
  EXPECT_EQ(doc.at("navmetrics").at("h_collision_pct").at("mean").get<double>(), 20.0);
}

TEST_F(CliTest, EvaluateTotalsMatchPerLogRecomputation) {
  const std::string eps = prepare(10, 4);
  ASSERT_EQ(call({"simulate", "--map", path("map.txt"), "--episodes", eps, "--policy", "greedy", "--out",
                  path("logs")}).code, 0);
  const auto r = call({"evaluate", "--map", path("map.txt"), "--logs", path("logs"), "--out", path("ev")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(slurp(dir_ / "ev" / "summary.json"));

  const auto grid = world::read_map_file(path("map.txt"));
  std::map<std::string, std::pair<int, int>> per_class;
  int success = 0, n = 0;
  for (const auto& f : log_files(path("logs"))) {
    const auto log = sim::read_log_file(f);
    for (const auto& e : encounters::analyze_log(log, grid, {})) {
      auto& [count, collided] = per_class[std::string(to_string(e.clazz))];
      ++count;
      collided += e.collided ? 1 : 0;
    }
    success += log.status == sim::Status::Success ? 1 : 0;
    ++n;
  }
  int total = 0;
  for (auto c : encounters::kAllClasses) {
    const Json& s = doc.at("encounters").at("per_class").at(std::string(to_string(c)));
    const auto [count, collided] = per_class[std::string(to_string(c))];
    EXPECT_EQ(s.at("count"), count) << to_string(c);
    EXPECT_EQ(s.at("collided"), collided) << to_string(c);
    total += count;
  }
  EXPECT_EQ(doc.at("encounters").at("total"), total);
  EXPECT_DOUBLE_EQ(doc.at("navmetrics").at("success_pct").at("mean").get<double>(), 100.0 * success / n);
  EXPECT_EQ(doc.at("run").at("command"), "evaluate");
  // One CSV row per encounter plus the header.
  const std::string csv = slurp(dir_ / "ev" / "encounters.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), total + 1);
}

TEST_F(CliTest, RenderCountsPosesAndIsStable) {
  const std::string eps = prepare(1);
  ASSERT_EQ(call({"simulate", "--map", path("map.txt"), "--episodes", eps, "--out", path("logs")}).code, 0);
  const std::string log = path("logs/episode_00000.jsonl");
  ASSERT_EQ(call({"render", "--map", path("map.txt"), "--log", log, "--out", path("a.svg")}).code, 0);
  ASSERT_EQ(call({"render", "--map", path("map.txt"), "--log", log, "--out", path("b.svg")}).code, 0);
  const std::string svg = slurp(path("a.svg"));
  EXPECT_EQ(svg, slurp(path("b.svg")));

  const auto parsed = sim::read_log_file(log);
  const auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t at = svg.find(needle); at != std::string::npos; at = svg.find(needle, at + 1)) ++n;
    return n;
  };
  EXPECT_EQ(count("class=\"agent-pose\""), parsed.records.size());
  EXPECT_EQ(count("class=\"pedestrian\""), parsed.episode.pedestrians.size());
  EXPECT_EQ(count("class=\"goal\""), 1u);
  const auto grid = world::read_map_file(path("map.txt"));
  EXPECT_EQ(count("class=\"encounter\""), encounters::analyze_log(parsed, grid, {}).size());

  ASSERT_EQ(call({"render", "--map", path("map.txt"), "--out", path("bare.svg")}).code, 0);
  const std::string bare = slurp(path("bare.svg"));
  EXPECT_EQ(bare.find("agent-pose"), std::string::npos);
  EXPECT_EQ(bare.find("class=\"goal\""), std::string::npos);
  EXPECT_NE(bare.find("<g class=\"map\""), std::string::npos);
  EXPECT_NE(bare.find("<metadata>{\"command\":\"render\""), std::string::npos);
}

TEST_F(CliTest, TrainResumeAndReproducibility) {
  prepare(0);
  const std::vector<std::string> base{"train", "--maps", path("map.txt"), "--envs", "2", "--rollout", "6",
                                      "--seed", "5", "--checkpoint-every", "2"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  auto r = call(with({"--updates", "3", "--out", path("full.json")}));
  ASSERT_EQ(r.code, 0) << r.err;
  r = call(with({"--updates", "3", "--out", path("again.json")}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("full.json")), slurp(path("again.json")));
  EXPECT_EQ(slurp(path("full.json.csv")), slurp(path("again.json.csv")));

  const auto ck = policy::load_checkpoint(path("full.json"));
  EXPECT_EQ(ck.updates, 3);
  EXPECT_EQ(ck.seed, 5u);
  EXPECT_FALSE(fs::exists(path("full.json.tmp")));
  EXPECT_EQ(Json::parse(slurp(path("full.json"))).at("run").at("command"), "train");

  // Two updates, then one more from the checkpoint: the log counts to three.
  ASSERT_EQ(call(with({"--updates", "2", "--out", path("part.json")})).code, 0);
  r = call(with({"--updates", "1", "--out", path("part.json"), "--resume", path("part.json")}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(policy::load_checkpoint(path("part.json")).updates, 3);
  std::istringstream csv(slurp(path("part.json.csv")));
  std::string line;
  std::vector<int> updates;
  std::getline(csv, line);
  EXPECT_EQ(line, "update,policy_loss,value_loss,aux_risk,aux_compass,mean_return");
  while (std::getline(csv, line)) updates.push_back(std::stoi(line));
  EXPECT_EQ(updates, (std::vector<int>{1, 2, 3}));

  // A learned checkpoint drives simulate.
  prepare(2);
  r = call({"simulate", "--map", path("map.txt"), "--episodes", path("eps.json"), "--policy", "learned",
            "--checkpoint", path("full.json"), "--jobs", "2", "--out", path("learned")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(log_files(path("learned")).size(), 2u);
}

TEST_F(CliTest, TrainResumeTrimsRowsPastTheCheckpoint) {
  prepare(0);
  ASSERT_EQ(call({"train", "--maps", path("map.txt"), "--envs", "2", "--rollout", "4", "--updates", "2", "--out",
                  path("ck.json"), "--train-log", path("log.csv")}).code, 0);
  // Rows written after the last checkpoint by an interrupted run.
  std::ofstream(path("log.csv"), std::ios::app) << "3,0,0,0,0,\n4,0,0,0,0,\n";
  ASSERT_EQ(call({"train", "--maps", path("map.txt"), "--envs", "2", "--rollout", "4", "--updates", "1", "--out",
                  path("ck.json"), "--train-log", path("log.csv"), "--resume", path("ck.json")}).code, 0);
  const std::string csv = slurp(path("log.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.find("3,0,0,0,0,"), std::string::npos);
}

}  // namespace
}  // namespace socnav::cli
