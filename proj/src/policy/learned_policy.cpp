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

#include <random>

#include "socnav/error.hpp"
#include "socnav/policy/agents.hpp"

namespace socnav::policy {

Eigen::Vector2d sample_action(const Eigen::Vector2d& mu, const Eigen::Vector2d& sigma, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double e0 = normal(rng);
  const double e1 = normal(rng);
  return {mu[0] + sigma[0] * e0, mu[1] + sigma[1] * e1};
}

LearnedPolicy::LearnedPolicy(const Network& net, ObservationConfig obs, bool deterministic)
    : net_(&net), obs_(obs), deterministic_(deterministic), beliefs_(net.zero_beliefs()) {
  obs_.validate();
  if (obs_.rays != net.config().rays)
    throw InputError("observation rays do not match the network input size");
}

void LearnedPolicy::begin_episode(const world::OccupancyGrid&, const sim::Episode&,
                                  const sim::SimConfig&) {
  beliefs_ = net_->zero_beliefs();
  raw_.setZero();
}

sim::Action LearnedPolicy::act(const sim::StepContext& ctx) {
  const StepOutput out = net_->step(beliefs_, observe(ctx, obs_));
  beliefs_ = out.beliefs;
  raw_ = deterministic_ ? Eigen::Vector2d(out.mu) : sample_action(out.mu, out.sigma, ctx.rng);
  return sim::Action::clamped(raw_[0], raw_[1]);
}

}  // namespace socnav::policy
