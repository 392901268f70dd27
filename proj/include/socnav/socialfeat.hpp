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

#include <iosfwd>
#include <span>
#include <vector>

#include "socnav/geometry.hpp"

namespace socnav::social {

/// Radii in meters. compass_radius must exceed risk_radius.
struct FeatureParams {
  double risk_radius = 2.0;
  double compass_radius = 5.0;
  int sectors = 8;

  /// Throws InputError when a constraint is violated.
  void validate() const;
};

/// Pedestrian position minus agent position, one entry per pedestrian, in
/// pedestrian order.
using SocialInformation = std::vector<Vec2>;

struct SocialFeatures {
  double risk = 0.0;
  std::vector<double> compass;

  friend bool operator==(const SocialFeatures&, const SocialFeatures&) = default;
};

SocialInformation social_information(const Pose& agent, std::span<const Pose> pedestrians);

/// clamp(1 - nearest / radius, 0, 1); an empty set yields 0.
double risk(const SocialInformation& si, double risk_radius);

/// Bearing of `delta` measured clockwise from `heading`, in [0, 2pi). A zero
/// offset counts as dead ahead.
double clockwise_bearing(Vec2 delta, double heading);

/// Sector j covers clockwise bearings [2pi j / k, 2pi (j + 1) / k).
int compass_sector(Vec2 delta, double heading, int sectors);

/// Per-sector risk within compass_radius, sectors unrolled clockwise from
/// the agent heading. Empty sectors are 0.
std::vector<double> social_compass(const SocialInformation& si, const Pose& agent,
                                   double compass_radius, int sectors);

SocialFeatures compute_features(const Pose& agent, std::span<const Pose> pedestrians,
                                const FeatureParams& params);

/// CSV with header "t,risk,compass_0,...": row i is timestep i.
void write_features_csv(std::ostream& out, std::span<const SocialFeatures> features, int sectors);

}  // namespace socnav::social
