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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scenarios.hpp"
#include "socnav/encounters.hpp"
#include "socnav/navmetrics.hpp"
#include "socnav/policy.hpp"
#include "socnav/socialfeat.hpp"
#include "socnav/world.hpp"

namespace {

using namespace socnav;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// C1 -------------------------------------------------------------------------

Verdict risk_and_compass_oracles() {
  constexpr int kConfigs = 1000;
  constexpr double kTol = 1e-9;
  constexpr double kLimit = 1.0;
  const auto t0 = Clock::now();
  const social::FeatureParams params;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_int_distribution<int> count(0, 6);
  double worst = 0.0;
  int empty = 0, boundary = 0, beyond = 0;
  for (int i = 0; i < kConfigs; ++i) {
    const int kind = i % 4;  // random, empty, on sector boundaries, beyond both radii
    Pose agent(5.0 * u(rng), 5.0 * u(rng), kind == 2 ? 0.0 : ang(rng));
    std::vector<Vec2> people;
    const int n = kind == 1 ? 0 : 1 + count(rng);
    for (int p = 0; p < n; ++p) {
      if (kind == 2) {
        // Exact multiples of 45 degrees from a zero heading.
        static constexpr int dirs[8][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}};
        const auto* d = dirs[std::uniform_int_distribution<int>(0, 7)(rng)];
        const double s = 0.25 * std::uniform_int_distribution<int>(1, 24)(rng);
        people.push_back({agent.x() + s * d[0], agent.y() + s * d[1]});
      } else if (kind == 3) {
        const double r = params.compass_radius * (1.0 + std::abs(u(rng)));
        const double a = ang(rng);
        people.push_back({agent.x() + r * std::cos(a), agent.y() + r * std::sin(a)});
      } else {
        people.push_back({agent.x() + 4.0 * u(rng), agent.y() + 4.0 * u(rng)});
      }
    }
    empty += people.empty();
    boundary += kind == 2;
    beyond += kind == 3;
    std::vector<Pose> peds;
    for (Vec2 p : people) peds.emplace_back(p, 0.0);
    const auto f = social::compute_features(agent, peds, params);
    worst = std::max(worst, std::abs(f.risk - oracle::risk_bruteforce(agent.position(), people, params.risk_radius)));
    const auto c = oracle::compass_bruteforce(agent.position(), agent.theta(), people, params.compass_radius,
                                              params.sectors);
    if (c.size() != f.compass.size()) return {false, "compass length mismatch"};
    for (std::size_t j = 0; j < c.size(); ++j) worst = std::max(worst, std::abs(c[j] - f.compass[j]));
  }
  const double secs = seconds_since(t0);
  return {worst <= kTol && secs < kLimit,
          fmt("max |err| %.3g over %d configs (%d empty, %d on sector boundaries, %d beyond radius), tol %.0e; "
              "%.3f s, limit %.0f s",
              worst, kConfigs, empty, boundary, beyond, kTol, secs, kLimit)};
}

// C2 -------------------------------------------------------------------------

Verdict geodesic_oracle() {
  constexpr int kGrids = 200;
  constexpr int kPairs = 5;
  constexpr double kLimit = 10.0;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  int checked = 0, mismatches = 0, unreachable = 0;
  for (int g_i = 0; g_i < kGrids; ++g_i) {
    const auto g = oracle::random_grid(rng, 30, 0.3);
    std::vector<int> free_cells;
    for (int i = 0; i < static_cast<int>(g.cell_count()); ++i)
      if (!g.cells()[static_cast<std::size_t>(i)]) free_cells.push_back(i);
    if (free_cells.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);
    for (int k = 0; k < kPairs; ++k) {
      const world::Cell a = g.cell_at(free_cells[pick(rng)]);
      const world::Cell b = g.cell_at(free_cells[pick(rng)]);
      const auto d = world::geodesic_distance(g, g.center(a), g.center(b));
      const auto o = oracle::geodesic(g, a.cx, a.cy, b.cx, b.cy);
      ++checked;
      if (d.has_value() != o.has_value() || (d && *d != *o)) {
        ++mismatches;
        continue;
      }
      const auto p = world::shortest_path(g, g.center(a), g.center(b));
      if (p.has_value() != o.has_value()) {
        ++mismatches;
        continue;
      }
      if (!o) {
        ++unreachable;
        continue;
      }
      // The path must be a legal walk whose own length is the oracle value.
      long long axial = 0, diag = 0;
      bool legal = g.cell_of(p->waypoints.front()) == a && g.cell_of(p->waypoints.back()) == b;
      for (std::size_t i = 1; i < p->waypoints.size() && legal; ++i) {
        const world::Cell u = g.cell_of(p->waypoints[i - 1]);
        const world::Cell v = g.cell_of(p->waypoints[i]);
        const int dx = v.cx - u.cx, dy = v.cy - u.cy;
        legal = std::abs(dx) <= 1 && std::abs(dy) <= 1 && (dx || dy) && g.free(v);
        if (legal && dx && dy) legal = !oracle::occupied(g, u.cx + dx, u.cy) || !oracle::occupied(g, u.cx, u.cy + dy);
        (dx && dy ? diag : axial) += 1;
      }
      const double walk = g.resolution() * (static_cast<double>(axial) + static_cast<double>(diag) * std::sqrt(2.0));
      if (!legal || walk != *o || p->length != *o) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kLimit,
          fmt("%d mismatches in %d queries on %d grids up to 30x30 (%d unreachable), exact; %.2f s, limit %.0f s",
              mismatches, checked, kGrids, unreachable, secs, kLimit)};
}

// C3 -------------------------------------------------------------------------

Verdict esr_arithmetic() {
  const auto set = scenarios::head_on_log_set(2);
  std::vector<encounters::Encounter> all;
  for (std::size_t i = 0; i < set.logs.size(); ++i) {
    const auto e = encounters::analyze_log(set.logs[i], set.grid, {}, static_cast<int>(i));
    all.insert(all.end(), e.begin(), e.end());
  }
  const auto rep = encounters::encounter_metrics(all, set.logs);
  const auto& s = rep.stats(encounters::EncounterClass::FrontalApproach);
  const bool pass = s.count == 10 && s.collided == 2 && s.esr && *s.esr == 80.0;
  return {pass, fmt("FrontalApproach: %d encounters, %d collisions, ESR %s (expected exactly 80)", s.count,
                    s.collided, s.esr ? fmt("%.17g", *s.esr).c_str() : "null")};
}

// C4 -------------------------------------------------------------------------

Verdict scenario_suite() {
  constexpr int kDraws = 25;
  constexpr double kMinCorrect = 0.95;
  constexpr double kLimit = 30.0;
  const auto t0 = Clock::now();
  using Builder = scenarios::Scenario (*)(std::mt19937_64&);
  const std::pair<const char*, Builder> families[] = {
      {"head-on", scenarios::head_on_corridor},
      {"crossing", scenarios::right_angle_crossing},
      {"corner", scenarios::occluded_doorway},
      {"following", scenarios::same_direction_following}};
  const encounters::EncounterParams params;
  std::string per_family;
  int total = 0, correct = 0, conflicting = 0;
  double worst_ddiff = 0.0;
  bool ddiff_ok = true;
  std::uint64_t seed = 400;
  bool family_ok = true;
  for (const auto& [name, build] : families) {
    int ok = 0, bad = 0;
    for (int i = 0; i < kDraws; ++i) {
      std::mt19937_64 rng(seed++);
      const auto sc = build(rng);
      const auto enc = encounters::analyze_log(sc.log, sc.grid, params);
      bool hit = false, conflict = false;
      for (const auto& e : enc) {
        hit |= e.clazz == sc.intended;
        conflict |= e.clazz != sc.intended && e.clazz != encounters::EncounterClass::Other;
        if (sc.intended == encounters::EncounterClass::BlindCorner) {
          const auto ev = encounters::gather_evidence(e, sc.log, sc.grid, params);
          if (ev.d_diff_t1) worst_ddiff = std::max(worst_ddiff, *ev.d_diff_t1);
          ddiff_ok &= ev.d_diff_t1.has_value() && *ev.d_diff_t1 <= params.d_diff_max;
        }
      }
      ok += hit;
      bad += conflict;
    }
    total += kDraws;
    correct += ok;
    conflicting += bad;
    family_ok &= ok >= kMinCorrect * kDraws;
    per_family += fmt(" %s %d/%d", name, ok, kDraws);
  }
  const double secs = seconds_since(t0);
  const bool pass = family_ok && correct >= kMinCorrect * total && conflicting == 0 && ddiff_ok && secs < kLimit;
  return {pass, fmt("intended%s; %d conflicting of %d (need >=95%% intended, 0 conflicting); corner d_diff(t1) "
                    "max %.3f m (<= 0.5); %.2f s, limit %.0f s",
                    per_family.c_str(), conflicting, total, worst_ddiff, secs, kLimit)};
}

// C5 -------------------------------------------------------------------------

policy::NetworkConfig toy_config() {
  policy::NetworkConfig c;
  c.rays = 6;
  c.visual_dim = 8;
  c.pose_dim = 4;
  c.belief_dim = 16;
  c.action_embed_dim = 4;
  c.sectors = 4;
  c.horizon = 4;
  c.tasks = {policy::Task::Risk, policy::Task::Compass};
  return c;
}

policy::SequenceBatch random_batch(const policy::NetworkConfig& cfg, int T, int B, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto fill = [&](policy::Matrix m, bool positive) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = positive ? unit(rng) : u(rng);
    return m;
  };
  policy::SequenceBatch b;
  for (int t = 0; t < T; ++t) {
    b.obs.push_back(fill(policy::Matrix(cfg.obs_dim(), B), false));
    b.actions.push_back(fill(policy::Matrix(2, B), false) * 1.5);
    b.aux_actions.push_back(fill(policy::Matrix(2, B), false));
    b.compass.push_back(fill(policy::Matrix(cfg.sectors, B), true));
  }
  for (int i = 0; i < cfg.beliefs(); ++i) b.h0.push_back(fill(policy::Matrix(cfg.belief_dim, B), false) * 0.5);
  b.mask = policy::Matrix::Ones(T, B);
  for (int col = 1; col < B; ++col)
    for (int t = T - col; t < T; ++t) b.mask(t, col) = 0.0;
  b.advantages = fill(policy::Matrix(T, B), false);
  b.returns = fill(policy::Matrix(T, B), false);
  b.risk = fill(policy::Matrix(T, B), true);
  return b;
}

Verdict gradient_check() {
  constexpr int kPoints = 100;
  constexpr double kTol = 1e-3;
  constexpr double kEps = 1e-6;
  constexpr double kFloor = 1e-6;  // relative error denominator floor
  constexpr double kLimit = 120.0;
  const auto t0 = Clock::now();
  const policy::NetworkConfig cfg = toy_config();
  const policy::LossWeights w{1.0, 0.5, 0.01, 1.0};
  double worst = 0.0;
  long checks = 0;
  for (int point = 0; point < kPoints; ++point) {
    Rng rng(derive_seed(500, static_cast<std::uint64_t>(point)));
    policy::Network net(cfg);
    net.initialize(rng);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    for (Eigen::Index i = 0; i < net.params().size(); ++i) net.params()[i] += jitter(rng);
    const auto batch = random_batch(cfg, 7, 3, rng);
    policy::Vector grad;
    net.loss(batch, w, &grad);
    // One coordinate from every block per point.
    for (const policy::Block& b : net.layout().blocks()) {
      const auto i = static_cast<Eigen::Index>(b.offset + std::uniform_int_distribution<std::size_t>(0, b.size() - 1)(rng));
      const double keep = net.params()[i];
      net.params()[i] = keep + kEps;
      const double up = net.loss(batch, w, nullptr).total;
      net.params()[i] = keep - kEps;
      const double down = net.loss(batch, w, nullptr).total;
      net.params()[i] = keep;
      const double numeric = (up - down) / (2.0 * kEps);
      const double rel = std::abs(grad[i] - numeric) / std::max({std::abs(grad[i]), std::abs(numeric), kFloor});
      worst = std::max(worst, rel);
      ++checks;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= kTol && secs < kLimit,
          fmt("d=16, 2 beliefs, risk+compass regressors, k=4: max rel err %.3g over %ld coordinates at %d "
              "parameter points, tol %.0e (eps %.0e); %.1f s, limit %.0f s",
              worst, checks, kPoints, kTol, kEps, secs, kLimit)};
}

// C6 -------------------------------------------------------------------------

// Sequences of `steps` consecutive records taken from social-baseline episodes.
policy::SequenceBatch logged_buffer(const policy::NetworkConfig& cfg, int sequences, int steps) {
  const world::OccupancyGrid grid = world::generate_map(600);
  const sim::SimConfig sim;
  const policy::ObservationConfig obs;
  policy::SequenceBatch b;
  b.obs.assign(static_cast<std::size_t>(steps), policy::Matrix::Zero(cfg.obs_dim(), sequences));
  b.actions.assign(static_cast<std::size_t>(steps), policy::Matrix::Zero(2, sequences));
  b.aux_actions = b.actions;
  b.compass.assign(static_cast<std::size_t>(steps), policy::Matrix::Zero(cfg.sectors, sequences));
  b.mask = policy::Matrix::Ones(steps, sequences);
  b.advantages = policy::Matrix::Zero(steps, sequences);
  b.returns = b.advantages;
  b.risk = b.advantages;
  for (int i = 0; i < cfg.beliefs(); ++i) b.h0.push_back(policy::Matrix::Zero(cfg.belief_dim, sequences));

  int filled = 0;
  for (std::uint64_t e = 0; filled < sequences; ++e) {
    Rng rng(derive_seed(601, e));
    const sim::Episode ep = sim::generate_episode(grid, rng, 3, sim);
    policy::SocialPolicy social;
    const sim::TrajectoryLog log = sim::run_episode(grid, ep, social, sim);
    for (std::size_t start = 0; start + static_cast<std::size_t>(steps) <= log.records.size() && filled < sequences;
         start += static_cast<std::size_t>(steps), ++filled) {
      for (int t = 0; t < steps; ++t) {
        const sim::StepRecord& r = log.records[start + static_cast<std::size_t>(t)];
        const auto ts = static_cast<std::size_t>(t);
        b.obs[ts].col(filled) = policy::observe(grid, r.agent, ep.goal, r.pedestrians, r.action,
                                                sim.physics.human_radius, obs);
        b.aux_actions[ts](0, filled) = r.action.lin_vel;
        b.aux_actions[ts](1, filled) = r.action.ang_vel;
        b.risk(t, filled) = r.features->risk;
        for (int k = 0; k < cfg.sectors; ++k)
          b.compass[ts](k, filled) = r.features->compass[static_cast<std::size_t>(k)];
      }
    }
  }
  return b;
}

Verdict auxiliary_smoke() {
  constexpr int kSequences = 16;
  constexpr int kSteps = 64;  // 16 x 64 = 1024 transitions
  constexpr int kMaxUpdates = 500;
  constexpr double kTarget = 0.5;  // loss must fall to half its start
  constexpr double kLimit = 120.0;
  const auto t0 = Clock::now();
  const policy::NetworkConfig cfg;
  const policy::SequenceBatch buffer = logged_buffer(cfg, kSequences, kSteps);
  policy::Network net(cfg);
  Rng rng(602);
  net.initialize(rng);
  const policy::LossWeights aux_only{0.0, 0.0, 0.0, 1.0};
  policy::AdamConfig adam;
  adam.lr = 1e-3;
  policy::AdamState state;
  policy::Vector grad;
  auto aux_total = [](const policy::LossBreakdown& l) {
    double s = 0.0;
    for (double a : l.aux) s += a;
    return s;
  };
  const double start = aux_total(net.loss(buffer, aux_only, nullptr));
  double latest = start;
  int reached = -1;
  int steps = 0;
  while (steps < kMaxUpdates) {
    net.loss(buffer, aux_only, &grad);
    policy::adam_step(net.params(), grad, state, adam);
    ++steps;
    latest = aux_total(net.loss(buffer, aux_only, nullptr));
    if (!std::isfinite(latest)) break;
    if (latest <= kTarget * start) {
      reached = steps;
      break;
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = reached > 0 && secs < kLimit;
  return {pass, fmt("aux loss %.5g -> %.5g (%.1f%% of start) on %d logged transitions; half reached at step %s of "
                    "%d (Adam lr 1e-3); %.1f s, limit %.0f s",
                    start, latest, 100.0 * latest / start, kSequences * kSteps,
                    reached > 0 ? std::to_string(reached).c_str() : "never", kMaxUpdates, secs, kLimit)};
}

// C7-C9 ----------------------------------------------------------------------

constexpr int kMaps = 5;
constexpr int kEpisodesPerMap = 200;
constexpr int kPedestrians = 3;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

struct ArmResult {
  int episodes = 0;
  int human_collisions = 0;
  int encounters = 0;
  int encounter_collisions = 0;
  std::vector<std::uint64_t> log_digests;
  std::string report_json;
  std::string summary_json;
  std::string curves_csv;
  std::vector<navmetrics::EpisodeMetrics> metrics;

  double hc_pct() const { return 100.0 * human_collisions / episodes; }
  double esr() const { return 100.0 * (encounters - encounter_collisions) / encounters; }
};

struct TrendRun {
  // [map][0 greedy, 1 social]
  std::vector<std::array<ArmResult, 2>> maps;
  double seconds = 0.0;
};

TrendRun run_trend() {
  const auto t0 = Clock::now();
  const sim::SimConfig cfg;
  TrendRun run;
  for (int m = 0; m < kMaps; ++m) {
    const world::OccupancyGrid grid = world::generate_map(500 + static_cast<std::uint64_t>(m));
    const auto episodes = sim::generate_episodes(grid, kEpisodesPerMap, 77 + static_cast<std::uint64_t>(m),
                                                 kPedestrians, cfg, {}, "map" + std::to_string(m));
    auto& arms = run.maps.emplace_back();
    for (int k = 0; k < 2; ++k) {
      ArmResult& arm = arms[static_cast<std::size_t>(k)];
      std::vector<sim::TrajectoryLog> logs;
      for (const auto& ep : episodes) {
        std::unique_ptr<sim::Policy> p;
        if (k == 0)
          p = std::make_unique<policy::GreedyPolicy>();
        else
          p = std::make_unique<policy::SocialPolicy>();
        logs.push_back(sim::run_episode(grid, ep, *p, cfg));
        std::ostringstream os;
        sim::write_log(os, logs.back());
        arm.log_digests.push_back(fnv1a(os.str()));
        arm.human_collisions += logs.back().status == sim::Status::HumanCollision;
        arm.metrics.push_back(navmetrics::episode_metrics(logs.back(), grid));
      }
      arm.episodes = static_cast<int>(logs.size());
      std::vector<encounters::Encounter> found;
      for (std::size_t i = 0; i < logs.size(); ++i) {
        const auto e = encounters::analyze_log(logs[i], grid, {}, static_cast<int>(i));
        found.insert(found.end(), e.begin(), e.end());
      }
      const auto rep = encounters::encounter_metrics(found, logs);
      arm.encounters = rep.overall.count;
      arm.encounter_collisions = rep.overall.collided;
      arm.report_json = encounters::report_to_json(rep);
      std::ostringstream curves;
      encounters::write_curves_csv(curves, rep);
      arm.curves_csv = curves.str();
      const std::vector<std::vector<navmetrics::EpisodeMetrics>> runs{arm.metrics};
      arm.summary_json = navmetrics::summary_to_json(navmetrics::aggregate(runs));
    }
  }
  run.seconds = seconds_since(t0);
  return run;
}

Verdict directional_trend(const TrendRun& run) {
  constexpr int kMinMaps = 4;
  constexpr double kLimit = 300.0;
  int maps_won = 0;
  int hc[2] = {0, 0}, enc[2] = {0, 0}, enc_coll[2] = {0, 0}, eps = 0;
  std::string per_map;
  for (const auto& arms : run.maps) {
    const ArmResult& g = arms[0];
    const ArmResult& s = arms[1];
    const bool won = s.hc_pct() < g.hc_pct() && s.esr() > g.esr();
    maps_won += won;
    per_map += fmt(" [HC %.1f/%.1f ESR %.1f/%.1f%s]", g.hc_pct(), s.hc_pct(), g.esr(), s.esr(), won ? "" : " lost");
    for (int k = 0; k < 2; ++k) {
      hc[k] += arms[static_cast<std::size_t>(k)].human_collisions;
      enc[k] += arms[static_cast<std::size_t>(k)].encounters;
      enc_coll[k] += arms[static_cast<std::size_t>(k)].encounter_collisions;
    }
    eps += g.episodes;
  }
  const double hc_g = 100.0 * hc[0] / eps, hc_s = 100.0 * hc[1] / eps;
  const double esr_g = 100.0 * (enc[0] - enc_coll[0]) / enc[0];
  const double esr_s = 100.0 * (enc[1] - enc_coll[1]) / enc[1];
  const bool pass = maps_won >= kMinMaps && hc_s < hc_g && esr_s > esr_g && run.seconds < kLimit;
  return {pass, fmt("greedy/social per map%s; %d/%d maps (need %d); aggregate HC %.2f%% -> %.2f%%, ESR %.2f%% -> "
                    "%.2f%% over %d episodes x 2 policies; %.1f s, limit %.0f s",
                    per_map.c_str(), maps_won, kMaps, kMinMaps, hc_g, hc_s, esr_g, esr_s, eps, run.seconds, kLimit)};
}

Verdict determinism(const TrendRun& a, const TrendRun& b) {
  int logs = 0, differing = 0, reports = 0, differing_reports = 0;
  for (std::size_t m = 0; m < a.maps.size(); ++m) {
    for (std::size_t k = 0; k < 2; ++k) {
      const ArmResult& x = a.maps[m][k];
      const ArmResult& y = b.maps[m][k];
      logs += static_cast<int>(x.log_digests.size());
      if (x.log_digests.size() != y.log_digests.size()) return {false, "episode counts differ"};
      for (std::size_t i = 0; i < x.log_digests.size(); ++i) differing += x.log_digests[i] != y.log_digests[i];
      reports += 3;
      differing_reports += (x.report_json != y.report_json) + (x.summary_json != y.summary_json) +
                           (x.curves_csv != y.curves_csv);
    }
  }
  return {differing == 0 && differing_reports == 0,
          fmt("%d/%d serialized logs differ (64-bit FNV-1a of the JSONL bytes), %d/%d reports differ (full byte "
              "comparison); repeat took %.1f s",
              differing, logs, differing_reports, reports, b.seconds)};
}

Verdict metric_identities(const TrendRun& run) {
  constexpr double kSumTol = 1e-9;
  int spl_out = 0, spl_failed = 0, sums_bad = 0, episodes = 0, bins_bad = 0, curve_sets = 0;
  double worst_sum = 0.0;
  for (const auto& arms : run.maps) {
    for (const ArmResult& arm : arms) {
      for (const auto& m : arm.metrics) {
        ++episodes;
        spl_out += !(m.spl >= 0.0 && m.spl <= 1.0);
        spl_failed += !m.success && m.spl != 0.0;
      }
      const std::vector<std::vector<navmetrics::EpisodeMetrics>> runs{arm.metrics};
      const auto s = navmetrics::aggregate(runs);
      const double sum = s.success_pct.mean + s.h_collision_pct.mean + s.timeout_pct.mean;
      worst_sum = std::max(worst_sum, std::abs(sum - 100.0));
      sums_bad += std::abs(sum - 100.0) > kSumTol;

      // Curves CSV: class,bin,completion_pct,alv,ad with 100 bins per class.
      std::istringstream in(arm.curves_csv);
      std::string line;
      std::getline(in, line);
      std::map<std::string, int> bins;
      while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
        if (cols.size() != 5) {
          ++bins_bad;
          continue;
        }
        ++bins[cols[0]];
        for (std::size_t c = 2; c < 5; ++c) bins_bad += !std::isfinite(std::stod(cols[c]));
      }
      for (auto c : encounters::kAllClasses) {
        ++curve_sets;
        bins_bad += bins[std::string(to_string(c))] != encounters::kCurveBins;
      }
    }
  }
  const bool pass = spl_out == 0 && spl_failed == 0 && sums_bad == 0 && bins_bad == 0;
  return {pass, fmt("%d episodes: %d SPL outside [0,1], %d failures with SPL != 0; success+HC+timeout off 100 by "
                    "at most %.2g (tol %.0e); %d class curves, %d bad bins (need exactly %d finite bins each)",
                    episodes, spl_out, spl_failed, worst_sum, kSumTol, curve_sets, bins_bad, encounters::kCurveBins)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* title, const Verdict& v) {
    std::printf("C%d %s %s: %s\n", id, v.pass ? "PASS" : "FAIL", title, v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  };
  auto guarded = [](const std::function<Verdict()>& f) -> Verdict {
    try {
      return f();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };
  report(1, "formula oracles", guarded(risk_and_compass_oracles));
  report(2, "geodesic oracle", guarded(geodesic_oracle));
  report(3, "protocol arithmetic", guarded(esr_arithmetic));
  report(4, "classifier scenarios", guarded(scenario_suite));
  report(5, "gradient check", guarded(gradient_check));
  report(6, "auxiliary learning", guarded(auxiliary_smoke));

  std::optional<TrendRun> first, second;
  report(7, "directional trend", guarded([&] {
           first = run_trend();
           return directional_trend(*first);
         }));
  report(8, "determinism", guarded([&] {
           if (!first) return Verdict{false, "criterion 7 did not run"};
           second = run_trend();
           return determinism(*first, *second);
         }));
  report(9, "metric identities", guarded([&] {
           if (!first) return Verdict{false, "criterion 7 did not run"};
           return metric_identities(*first);
         }));
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
