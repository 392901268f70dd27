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

#include "socnav/policy/trainer.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "socnav/error.hpp"
#include "socnav/policy/agents.hpp"

namespace socnav::policy {

void adam_step(Vector& params, const Vector& grad, AdamState& s, const AdamConfig& cfg) {
  if (grad.size() != params.size()) throw InputError("adam_step: gradient size mismatch");
  if (s.m.size() != params.size()) {
    s.m = Vector::Zero(params.size());
    s.v = Vector::Zero(params.size());
  }
  ++s.step;
  s.m = cfg.beta1 * s.m + (1.0 - cfg.beta1) * grad;
  s.v = cfg.beta2 * s.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(s.step));
  params.array() -= cfg.lr * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + cfg.eps);
}

double clip_gradient(Vector& grad, double max_norm) {
  const double n = grad.norm();
  if (max_norm > 0.0 && n > max_norm) grad *= max_norm / n;
  return n;
}

void TrainerConfig::validate() const {
  if (envs < 1 || rollout < 1) throw InputError("trainer: envs and rollout must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InputError("trainer: gamma must be in [0, 1]");
  if (!(adam.lr >= 0.0)) throw InputError("trainer: learning rate must be non-negative");
  if (pedestrians < 0) throw InputError("trainer: pedestrian count must be non-negative");
  if (!(grad_clip >= 0.0)) throw InputError("trainer: grad_clip must be non-negative");
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, r.ptr - buf);
}

}  // namespace

void write_training_header(std::ostream& out) {
  out << "update,policy_loss,value_loss,aux_risk,aux_compass,mean_return\n";
}

void write_training_row(std::ostream& out, const TrainingRow& row) {
  out << row.update << ',';
  put(out, row.policy_loss);
  out << ',';
  put(out, row.value_loss);
  out << ',';
  put(out, row.aux_risk);
  out << ',';
  put(out, row.aux_compass);
  out << ',';
  if (row.mean_return) put(out, *row.mean_return);
  out << '\n';
}

struct Trainer::Env {
  int index = 0;
  std::uint64_t episodes = 0;
  std::unique_ptr<sim::Simulation> sim;
  std::vector<Vector> beliefs;
  double ret = 0.0;
};

Trainer::Trainer(Network& net, std::vector<world::OccupancyGrid> maps, sim::SimConfig sim,
                 TrainerConfig cfg, ObservationConfig obs)
    : net_(net), maps_(std::move(maps)), sim_(std::move(sim)), cfg_(cfg), obs_(obs) {
  if (maps_.empty()) throw InputError("trainer: no training maps");
  cfg_.validate();
  sim_.validate();
  obs_.validate();
  if (obs_.rays != net_.config().rays) throw InputError("trainer: observation rays do not match the network");
  if (sim_.features.sectors != net_.config().sectors)
    throw InputError("trainer: compass sectors do not match the network");
  restore(0, {});
}

Trainer::~Trainer() = default;

void Trainer::restore(int updates, AdamState adam) {
  updates_ = updates;
  adam_ = std::move(adam);
  envs_.clear();
  for (int e = 0; e < cfg_.envs; ++e) {
    auto env = std::make_unique<Env>();
    env->index = e;
    reset_env(*env);
    envs_.push_back(std::move(env));
  }
}

void Trainer::reset_env(Env& env) {
  const std::uint64_t stream =
      derive_seed(derive_seed(cfg_.seed, static_cast<std::uint64_t>(env.index)),
                  static_cast<std::uint64_t>(updates_));
  Rng rng(derive_seed(stream, env.episodes++));
  const std::size_t m = static_cast<std::size_t>(rng() % maps_.size());
  sim::Episode ep = sim::generate_episode(maps_[m], rng, cfg_.pedestrians, sim_, {},
                                          "train-" + std::to_string(m));
  env.sim = std::make_unique<sim::Simulation>(maps_[m], std::move(ep), sim_);
  env.beliefs = net_.zero_beliefs();
  env.ret = 0.0;
}

TrainingRow Trainer::update() {
  const NetworkConfig& nc = net_.config();
  const int T = cfg_.rollout;
  const int B = cfg_.envs;
  SequenceBatch b;
  b.obs.assign(T, Matrix::Zero(nc.obs_dim(), B));
  b.mask = Matrix::Zero(T, B);
  b.h0.assign(static_cast<std::size_t>(nc.beliefs()), Matrix::Zero(nc.belief_dim, B));
  b.actions.assign(T, Matrix::Zero(2, B));
  b.advantages = Matrix::Zero(T, B);
  b.returns = Matrix::Zero(T, B);
  b.aux_actions.assign(T, Matrix::Zero(2, B));
  b.risk = Matrix::Zero(T, B);
  b.compass.assign(T, Matrix::Zero(nc.sectors, B));

  std::vector<double> finished;
  for (int e = 0; e < B; ++e) {
    Env& env = *envs_[static_cast<std::size_t>(e)];
    for (std::size_t i = 0; i < env.beliefs.size(); ++i) b.h0[i].col(e) = env.beliefs[i];
    std::vector<double> values;
    std::vector<double> rewards;
    bool terminal = false;
    for (int t = 0; t < T && !terminal; ++t) {
      const sim::StepContext ctx = env.sim->context();
      const Vector obs = observe(ctx, obs_);
      const StepOutput out = net_.step(env.beliefs, obs);
      const Eigen::Vector2d u = sample_action(out.mu, out.sigma, ctx.rng);
      b.obs[t].col(e) = obs;
      b.mask(t, e) = 1.0;
      b.actions[t].col(e) = u;
      b.aux_actions[t](0, e) = ctx.prev_action.lin_vel;
      b.aux_actions[t](1, e) = ctx.prev_action.ang_vel;
      b.risk(t, e) = ctx.features.risk;
      for (int s = 0; s < nc.sectors; ++s) b.compass[t](s, e) = ctx.features.compass[static_cast<std::size_t>(s)];
      values.push_back(out.value);
      env.beliefs = out.beliefs;
      const sim::StepRecord& rec = env.sim->step(sim::Action::clamped(u[0], u[1]));
      rewards.push_back(rec.outcome.reward);
      env.ret += rec.outcome.reward;
      terminal = env.sim->done();
    }
    double ret = 0.0;
    if (!terminal) ret = net_.step(env.beliefs, observe(env.sim->context(), obs_)).value;
    for (int t = static_cast<int>(rewards.size()) - 1; t >= 0; --t) {
      ret = rewards[static_cast<std::size_t>(t)] + cfg_.gamma * ret;
      b.returns(t, e) = ret;
      b.advantages(t, e) = ret - values[static_cast<std::size_t>(t)];
    }
    if (terminal) {
      finished.push_back(env.ret);
      reset_env(env);
    }
  }

  Vector grad;
  const LossBreakdown loss = net_.loss(b, cfg_.weights, &grad);
  if (!std::isfinite(loss.total) || !grad.allFinite()) {
    std::ostringstream msg;
    msg << "training diverged at update " << updates_ + 1 << ": loss=" << loss.total
        << " policy=" << loss.policy << " value=" << loss.value;
    throw TrainingDiverged(msg.str());
  }
  clip_gradient(grad, cfg_.grad_clip);
  adam_step(net_.params(), grad, adam_, cfg_.adam);
  ++updates_;

  TrainingRow row;
  row.update = updates_;
  row.policy_loss = loss.policy;
  row.value_loss = loss.value;
  for (std::size_t i = 0; i < nc.tasks.size(); ++i)
    (nc.tasks[i] == Task::Risk ? row.aux_risk : row.aux_compass) = loss.aux[i];
  if (!finished.empty()) {
    double s = 0.0;
    for (double r : finished) s += r;
    row.mean_return = s / static_cast<double>(finished.size());
  }
  return row;
}

}  // namespace socnav::policy
