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

#include "socnav/simcore.hpp"

namespace socnav::sim {

StepOutcome compute_reward(std::optional<double> prev_geodesic, std::optional<double> geodesic,
                           Action action, bool collided, const Termination& termination,
                           const RewardConfig& cfg) {
  StepOutcome out;
  out.coll = collided;
  out.back = action.lin_vel < 0.0;
  out.succ = termination.status == Status::Success;
  out.human_coll = termination.status == Status::HumanCollision;
  out.human_id = out.human_coll ? termination.pedestrian : -1;
  if (prev_geodesic && geodesic) {
    out.terms.progress = -(*geodesic - *prev_geodesic);
  } else {
    out.geodesic_unavailable = true;
  }
  out.terms.slack = cfg.slack;
  const int indicators = (out.coll ? 1 : 0) + (out.back ? 1 : 0);
  out.terms.collision = -cfg.collision_backward * indicators;
  out.terms.success = out.succ ? cfg.success_bonus : 0.0;
  out.reward = out.terms.total();
  return out;
}

}  // namespace socnav::sim
