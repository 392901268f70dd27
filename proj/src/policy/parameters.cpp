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
#include <cmath>
#include <numbers>
#include <random>

#include "socnav/error.hpp"
#include "socnav/policy/network.hpp"

namespace socnav::policy {

std::string_view to_string(Task t) { return t == Task::Risk ? "risk" : "compass"; }

Task task_from_string(std::string_view s) {
  if (s == "risk") return Task::Risk;
  if (s == "compass") return Task::Compass;
  throw InputError("unknown auxiliary task '" + std::string(s) + "'");
}

void NetworkConfig::validate() const {
  if (rays < 1 || visual_dim < 1 || pose_dim < 1 || belief_dim < 1 || action_embed_dim < 1)
    throw InputError("network sizes must be positive");
  if (sectors < 2) throw InputError("network sectors must be at least 2");
  if (horizon < 1) throw InputError("regressor horizon must be at least 1");
  if (tasks.empty()) throw InputError("at least one auxiliary task is required");
  for (std::size_t i = 0; i < tasks.size(); ++i)
    for (std::size_t j = i + 1; j < tasks.size(); ++j)
      if (tasks[i] == tasks[j]) throw InputError("auxiliary tasks must be distinct");
}

std::size_t ParameterLayout::add(std::string name, int rows, int cols) {
  Block b{std::move(name), rows, cols, total_};
  total_ += b.size();
  blocks_.push_back(std::move(b));
  return blocks_.size() - 1;
}

const Block& ParameterLayout::find(std::string_view name) const {
  for (const Block& b : blocks_)
    if (b.name == name) return b;
  throw InputError("unknown parameter block '" + std::string(name) + "'");
}

Network::Gru Network::add_gru(const std::string& prefix, int inputs) {
  const int d = config_.belief_dim;
  return {layout_.add(prefix + ".Wx", 3 * d, inputs), layout_.add(prefix + ".Wh", 3 * d, d),
          layout_.add(prefix + ".b", 3 * d, 1)};
}

Network::Network(NetworkConfig config) : config_(std::move(config)) {
  config_.validate();
  const int d = config_.belief_dim;
  const int f = config_.feature_dim();
  enc_v_w_ = layout_.add("enc.visual.W", config_.visual_dim, config_.rays);
  enc_v_b_ = layout_.add("enc.visual.b", config_.visual_dim, 1);
  enc_p_w_ = layout_.add("enc.pose.W", config_.pose_dim, NetworkConfig::kPoseInputs);
  enc_p_b_ = layout_.add("enc.pose.b", config_.pose_dim, 1);
  for (Task t : config_.tasks) beliefs_.push_back(add_gru("belief." + std::string(to_string(t)), f));
  key_w_ = layout_.add("attn.key.W", d, f);
  key_b_ = layout_.add("attn.key.b", d, 1);
  head_w_ = layout_.add("head.W", 5, d);
  head_b_ = layout_.add("head.b", 5, 1);
  for (Task t : config_.tasks) {
    const std::string p = "reg." + std::string(to_string(t));
    Regressor r{};
    r.embed_w = layout_.add(p + ".embed.W", config_.action_embed_dim, 2);
    r.embed_b = layout_.add(p + ".embed.b", config_.action_embed_dim, 1);
    r.gru = add_gru(p, config_.action_embed_dim);
    r.out_w = layout_.add(p + ".out.W", config_.task_outputs(t), d);
    r.out_b = layout_.add(p + ".out.b", config_.task_outputs(t), 1);
    regressors_.push_back(r);
  }
  params_ = Vector::Zero(static_cast<Eigen::Index>(layout_.total()));
}

MatrixMap Network::block(std::size_t i) {
  const Block& b = layout_.at(i);
  return MatrixMap(params_.data() + b.offset, b.rows, b.cols);
}

ConstMatrixMap Network::block(std::size_t i) const {
  const Block& b = layout_.at(i);
  return ConstMatrixMap(params_.data() + b.offset, b.rows, b.cols);
}

void Network::initialize(Rng& rng) {
  params_.setZero();
  for (std::size_t i = 0; i < layout_.blocks().size(); ++i) {
    const Block& b = layout_.at(i);
    if (b.cols == 1) continue;  // biases
    const double limit = std::sqrt(6.0 / (b.rows + b.cols));
    std::uniform_real_distribution<double> u(-limit, limit);
    MatrixMap m = block(i);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = u(rng);
  }
  // Small initial policy outputs; sigma = softplus(b) + floor ~ 0.5.
  block(head_w_) *= 0.1;
  MatrixMap hb = block(head_b_);
  hb(2, 0) = hb(3, 0) = std::log(std::expm1(0.5 - kSigmaFloor));
}

std::vector<Vector> Network::zero_beliefs() const {
  return std::vector<Vector>(beliefs_.size(), Vector::Zero(config_.belief_dim));
}

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

double gaussian_log_prob(const Eigen::Vector2d& u, const Eigen::Vector2d& mu,
                         const Eigen::Vector2d& sigma) {
  double lp = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double z = (u[c] - mu[c]) / sigma[c];
    lp += -0.5 * z * z - std::log(sigma[c]) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

double auxiliary_loss(const Matrix& predictions, const Matrix& truth, int horizon) {
  if (predictions.rows() != truth.rows() || predictions.cols() != truth.cols())
    throw InputError("auxiliary_loss: shape mismatch");
  if (horizon < 1) throw InputError("auxiliary_loss: horizon must be positive");
  const Matrix diff = predictions - truth;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < diff.rows(); ++j) sum += diff.row(j).squaredNorm() / diff.cols();
  return sum / horizon;
}

}  // namespace socnav::policy
