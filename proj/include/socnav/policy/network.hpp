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

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "socnav/rng.hpp"

namespace socnav::policy {

enum class Task { Risk, Compass };

std::string_view to_string(Task t);
/// Throws InputError on an unknown name.
Task task_from_string(std::string_view s);

/// Network sizes. The observation is the ray depths followed by goal
/// distance, sin and cos of the goal bearing, and the previous action.
struct NetworkConfig {
  int rays = 24;
  int visual_dim = 64;
  int pose_dim = 8;
  int belief_dim = 64;
  int action_embed_dim = 8;
  int sectors = 8;
  int horizon = 4;
  std::vector<Task> tasks{Task::Risk, Task::Compass};

  static constexpr int kPoseInputs = 5;

  void validate() const;
  int obs_dim() const { return rays + kPoseInputs; }
  int feature_dim() const { return visual_dim + pose_dim; }
  int beliefs() const { return static_cast<int>(tasks.size()); }
  int task_outputs(Task t) const { return t == Task::Risk ? 1 : sectors; }

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// A named matrix stored column-major inside the flat parameter vector.
struct Block {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  std::size_t size() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
};

class ParameterLayout {
 public:
  std::size_t add(std::string name, int rows, int cols);
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& at(std::size_t i) const { return blocks_[i]; }
  /// Throws InputError for an unknown name.
  const Block& find(std::string_view name) const;
  std::size_t total() const { return total_; }

 private:
  std::vector<Block> blocks_;
  std::size_t total_ = 0;
};

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

/// T steps of B parallel sequences. Padding steps (mask 0) may only follow
/// the valid steps of a column.
struct SequenceBatch {
  std::vector<Matrix> obs;          // T x (obs_dim x B)
  Matrix mask;                      // T x B
  std::vector<Matrix> h0;           // per belief, d x B; treated as constant
  std::vector<Matrix> actions;      // T x (2 x B), raw sampled actions
  Matrix advantages;                // T x B
  Matrix returns;                   // T x B
  std::vector<Matrix> aux_actions;  // T x (2 x B), action stored with state t
  Matrix risk;                      // T x B
  std::vector<Matrix> compass;      // T x (sectors x B)

  int steps() const { return static_cast<int>(obs.size()); }
  int width() const { return obs.empty() ? 0 : static_cast<int>(obs.front().cols()); }
};

struct LossWeights {
  double policy = 1.0;
  double value = 0.5;
  double entropy = 1e-3;
  double aux = 1.0;
};

struct LossBreakdown {
  double total = 0.0;
  double policy = 0.0;      // mean of -A log pi
  double value = 0.0;       // mean of (V - R)^2 / 2
  double entropy = 0.0;     // mean entropy
  std::vector<double> aux;  // per task
  int steps = 0;
  int aux_windows = 0;
};

struct StepOutput {
  Eigen::Vector2d mu;
  Eigen::Vector2d sigma;
  double value = 0.0;
  std::vector<Vector> beliefs;
  Vector weights;  // attention over beliefs
  Vector fused;
};

class Network {
 public:
  static constexpr double kSigmaFloor = 1e-3;

  explicit Network(NetworkConfig config);

  const NetworkConfig& config() const { return config_; }
  const ParameterLayout& layout() const { return layout_; }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  /// Glorot-uniform weights and zero biases; the sigma bias starts sigma near 0.5.
  void initialize(Rng& rng);

  MatrixMap block(std::size_t i);
  ConstMatrixMap block(std::size_t i) const;

  std::vector<Vector> zero_beliefs() const;
  /// Fused feature phi_f for one observation.
  Vector encode(const Vector& obs) const;
  /// One recurrent step of every belief, then attention and heads.
  StepOutput step(const std::vector<Vector>& beliefs, const Vector& obs) const;
  /// Rows are predictions for s_t .. s_{t+k}; `actions` holds the k+1
  /// actions as columns.
  Matrix predict(int task_index, const Vector& h, const Matrix& actions) const;

  /// Combined loss over a batch. When grad is non-null it is resized and
  /// filled with d loss / d params.
  LossBreakdown loss(const SequenceBatch& batch, const LossWeights& weights, Vector* grad) const;

 private:
  struct Gru {
    std::size_t wx, wh, b;
  };
  struct Regressor {
    std::size_t embed_w, embed_b;
    Gru gru;
    std::size_t out_w, out_b;
  };

  Gru add_gru(const std::string& prefix, int inputs);

  NetworkConfig config_;
  ParameterLayout layout_;
  Vector params_;
  std::size_t enc_v_w_ = 0, enc_v_b_ = 0, enc_p_w_ = 0, enc_p_b_ = 0;
  std::size_t key_w_ = 0, key_b_ = 0, head_w_ = 0, head_b_ = 0;
  std::vector<Gru> beliefs_;
  std::vector<Regressor> regressors_;

  friend class Forward;
};

double softplus(double x);

/// Normal log density summed over both action components.
double gaussian_log_prob(const Eigen::Vector2d& u, const Eigen::Vector2d& mu,
                         const Eigen::Vector2d& sigma);

/// Auxiliary loss of one window: per-step MSE summed over the horizon and
/// divided by k.
double auxiliary_loss(const Matrix& predictions, const Matrix& truth, int horizon);

}  // namespace socnav::policy
