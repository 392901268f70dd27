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
#include <limits>
#include <ostream>

#include "socnav/error.hpp"
#include "socnav/socialfeat.hpp"

namespace socnav::social {

namespace {

double proximity(double nearest, double radius) {
  return std::clamp(1.0 - nearest / radius, 0.0, 1.0);
}

}  // namespace

void FeatureParams::validate() const {
  if (!(risk_radius > 0.0)) throw InputError("risk radius must be positive");
  if (!(compass_radius > risk_radius))
    throw InputError("compass radius must exceed the risk radius");
  if (sectors < 2) throw InputError("social compass needs at least 2 sectors");
}

SocialInformation social_information(const Pose& agent, std::span<const Pose> pedestrians) {
  SocialInformation si;
  si.reserve(pedestrians.size());
  for (const Pose& p : pedestrians) si.push_back(p.position() - agent.position());
  return si;
}

double risk(const SocialInformation& si, double risk_radius) {
  if (!(risk_radius > 0.0)) throw InputError("risk radius must be positive");
  double nearest = std::numeric_limits<double>::infinity();
  for (Vec2 d : si) nearest = std::min(nearest, d.norm());
  return proximity(nearest, risk_radius);
}

double clockwise_bearing(Vec2 delta, double heading) {
  if (delta.x == 0.0 && delta.y == 0.0) return 0.0;
  return wrap_angle_positive(heading - std::atan2(delta.y, delta.x));
}

int compass_sector(Vec2 delta, double heading, int sectors) {
  const double width = kTwoPi / sectors;
  const int j = static_cast<int>(std::floor(clockwise_bearing(delta, heading) / width));
  return std::clamp(j, 0, sectors - 1);
}

std::vector<double> social_compass(const SocialInformation& si, const Pose& agent,
                                   double compass_radius, int sectors) {
  if (sectors < 2) throw InputError("social compass needs at least 2 sectors");
  if (!(compass_radius > 0.0)) throw InputError("compass radius must be positive");
  std::vector<double> nearest(static_cast<std::size_t>(sectors),
                              std::numeric_limits<double>::infinity());
  for (Vec2 d : si) {
    auto& slot = nearest[static_cast<std::size_t>(compass_sector(d, agent.theta(), sectors))];
    slot = std::min(slot, d.norm());
  }
  std::vector<double> out(nearest.size());
  std::transform(nearest.begin(), nearest.end(), out.begin(),
                 [&](double n) { return proximity(n, compass_radius); });
  return out;
}

SocialFeatures compute_features(const Pose& agent, std::span<const Pose> pedestrians,
                                const FeatureParams& params) {
  const auto si = social_information(agent, pedestrians);
  return {risk(si, params.risk_radius),
          social_compass(si, agent, params.compass_radius, params.sectors)};
}

void write_features_csv(std::ostream& out, std::span<const SocialFeatures> features,
                        int sectors) {
  out << "t,risk";
  for (int j = 0; j < sectors; ++j) out << ",compass_" << j;
  out << '\n';
  for (std::size_t t = 0; t < features.size(); ++t) {
    out << t << ',' << features[t].risk;
    for (double c : features[t].compass) out << ',' << c;
    out << '\n';
  }
}

}  // namespace socnav::social
