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

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socnav/simcore.hpp"
#include "socnav/world.hpp"

namespace socnav::encounters {

/// Times are in timesteps, distances in meters, angles in radians.
struct EncounterParams {
  int t_min = 10;
  double d_max = 3.0;
  int t_front = 5;
  double theta_max = kPi / 3.0;
  double delta_slack = kPi / 6.0;
  int t_view = 5;
  int t_blind = 5;
  double fov = kPi / 2.0;
  double sight_range = 5.0;
  double min_displacement = 0.2;
  double d_diff_max = 0.5;

  /// Throws InputError when a value is non-positive, t_front > t_min or
  /// theta_max > pi.
  void validate() const;
};

enum class EncounterClass { FrontalApproach, Intersection, BlindCorner, PersonFollowing, Other };

inline constexpr std::array<EncounterClass, 5> kAllClasses{
    EncounterClass::FrontalApproach, EncounterClass::Intersection, EncounterClass::BlindCorner,
    EncounterClass::PersonFollowing, EncounterClass::Other};

std::string_view to_string(EncounterClass c);

struct Encounter {
  int episode = 0;  // index into the log set the encounter came from
  int pedestrian = 0;
  int t1 = 0;
  int t2 = 0;
  EncounterClass clazz = EncounterClass::Other;
  bool collided = false;

  friend bool operator==(const Encounter&, const Encounter&) = default;
};

/// True when pedestrian `ped` is outside the field of view, beyond sight
/// range, or occluded at record t.
bool blind(const sim::TrajectoryLog& log, const world::OccupancyGrid& grid,
           const EncounterParams& params, int t, int ped);

/// Angle of last - first; nullopt below min_displacement.
std::optional<double> general_direction(std::span<const Vec2> positions, double min_displacement);

/// Whether two polylines share any point (proper crossings and touching).
bool paths_intersect(std::span<const Vec2> a, std::span<const Vec2> b);

/// Closed-segment intersection test used by paths_intersect.
bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);

/// Maximal spatially-close intervals that pass the time and heading
/// constraints. Classes are left as Other.
std::vector<Encounter> extract_encounters(const sim::TrajectoryLog& log,
                                          const world::OccupancyGrid& grid,
                                          const EncounterParams& params, int episode = 0);

/// Inputs of the inclusion rules for one encounter.
struct RuleEvidence {
  bool blind_prefix = false;    // blind on every t in [t1, t1 + t_blind]
  bool visible_prefix = false;  // visible on every t in [t1, t1 + t_view]
  std::optional<double> d_diff_t1;
  std::optional<double> angle_diff;  // |wrap(dir_ped - dir_agent)| at t2, in [0, pi]
  bool intersect = false;
};

RuleEvidence gather_evidence(const Encounter& e, const sim::TrajectoryLog& log,
                             const world::OccupancyGrid& grid, const EncounterParams& params);

/// Whether the evidence satisfies the inclusion rule of class c on its own.
/// Other is satisfied by anything.
bool satisfies(EncounterClass c, const RuleEvidence& ev, const EncounterParams& params);

/// First class in the fixed order BlindCorner, Frontal, Intersection,
/// Following whose rule holds; Other otherwise.
EncounterClass classify(const Encounter& e, const sim::TrajectoryLog& log,
                        const world::OccupancyGrid& grid, const EncounterParams& params);

/// Extract and classify.
std::vector<Encounter> analyze_log(const sim::TrajectoryLog& log, const world::OccupancyGrid& grid,
                                   const EncounterParams& params, int episode = 0);

inline constexpr int kCurveBins = 100;

struct ClassStats {
  int count = 0;
  int collided = 0;
  std::optional<double> esr;  // percent; empty class has none
  std::optional<double> alv;  // m/s
  std::optional<double> ad;   // m
};

struct Curves {
  std::array<double, kCurveBins> completion{};  // bin centers, percent
  std::array<double, kCurveBins> alv{};
  std::array<double, kCurveBins> ad{};
};

struct EncounterReport {
  EncounterParams params;
  double v_max = 0.0;
  int total = 0;
  std::array<ClassStats, 5> per_class;
  std::array<Curves, 5> curves;
  ClassStats overall;

  const ClassStats& stats(EncounterClass c) const { return per_class[static_cast<std::size_t>(c)]; }
};

/// Per-encounter ALV (mean commanded speed) and AD (mean distance).
double encounter_alv(const Encounter& e, const sim::TrajectoryLog& log);
double encounter_ad(const Encounter& e, const sim::TrajectoryLog& log);

/// Values on [t1, t2] resampled at the bin centers by linear interpolation.
std::array<double, kCurveBins> resample(std::span<const double> values);

/// Encounter.episode indexes `logs`. Throws InputError on a dangling index.
EncounterReport encounter_metrics(std::span<const Encounter> encounters,
                                  std::span<const sim::TrajectoryLog> logs,
                                  const EncounterParams& params = {});

std::string report_to_json(const EncounterReport& report);
/// Columns: class,bin,completion_pct,alv,ad.
void write_curves_csv(std::ostream& out, const EncounterReport& report);

}  // namespace socnav::encounters
