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

#include <cmath>
#include <numbers>

#include "socnav/error.hpp"
#include "socnav/policy/network.hpp"

namespace socnav::policy {
namespace {

Matrix sigmoid(const Matrix& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

void add_bias(Matrix& m, const ConstMatrixMap& b) { m.colwise() += b.col(0); }

struct GruCache {
  Matrix x, h_prev, z, r, rh, n, h;
};

struct StepCache {
  Matrix rays, pose, phv, phf;
  std::vector<GruCache> gru;
  Matrix key, weights, fused, out;
};

Eigen::Vector2d sigma_of(const Matrix& out, Eigen::Index col) {
  return {softplus(out(2, col)) + Network::kSigmaFloor, softplus(out(3, col)) + Network::kSigmaFloor};
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

// Forward and backward passes over the flat parameter vector.
class Forward {
 public:
  Forward(const Network& net, Vector* grad) : net_(net), grad_(grad), d_(net.config_.belief_dim) {}

  ConstMatrixMap p(std::size_t i) const { return net_.block(i); }
  MatrixMap g(std::size_t i) const {
    const Block& b = net_.layout_.at(i);
    return MatrixMap(grad_->data() + b.offset, b.rows, b.cols);
  }

  GruCache gru(const Network::Gru& w, const Matrix& x, const Matrix& h_prev) const {
    GruCache c;
    c.x = x;
    c.h_prev = h_prev;
    Matrix a = p(w.wx) * x;
    add_bias(a, p(w.b));
    const ConstMatrixMap wh = p(w.wh);
    const Matrix zr = a.topRows(2 * d_) + wh.topRows(2 * d_) * h_prev;
    c.z = sigmoid(zr.topRows(d_));
    c.r = sigmoid(zr.bottomRows(d_));
    c.rh = c.r.cwiseProduct(h_prev);
    c.n = (a.bottomRows(d_) + wh.bottomRows(d_) * c.rh).array().tanh().matrix();
    c.h = (1.0 - c.z.array()).matrix().cwiseProduct(c.n) + c.z.cwiseProduct(h_prev);
    return c;
  }

  // Returns dx; dh is replaced by d h_prev.
  Matrix gru_backward(const Network::Gru& w, const GruCache& c, Matrix& dh) const {
    const ConstMatrixMap wh = p(w.wh);
    const Matrix dn = dh.cwiseProduct((1.0 - c.z.array()).matrix());
    const Matrix dz = dh.cwiseProduct(c.h_prev - c.n);
    Matrix dhp = dh.cwiseProduct(c.z);
    const Matrix dn_pre = (dn.array() * (1.0 - c.n.array().square())).matrix();
    const Matrix drh = wh.bottomRows(d_).transpose() * dn_pre;
    const Matrix dr = drh.cwiseProduct(c.h_prev);
    dhp += drh.cwiseProduct(c.r);
    Matrix da(3 * d_, dh.cols());
    da.topRows(d_) = (dz.array() * c.z.array() * (1.0 - c.z.array())).matrix();
    da.middleRows(d_, d_) = (dr.array() * c.r.array() * (1.0 - c.r.array())).matrix();
    da.bottomRows(d_) = dn_pre;
    g(w.wx).noalias() += da * c.x.transpose();
    g(w.b).col(0) += da.rowwise().sum();
    MatrixMap gwh = g(w.wh);
    gwh.topRows(2 * d_).noalias() += da.topRows(2 * d_) * c.h_prev.transpose();
    gwh.bottomRows(d_).noalias() += dn_pre * c.rh.transpose();
    dhp.noalias() += wh.topRows(2 * d_).transpose() * da.topRows(2 * d_);
    dh = std::move(dhp);
    return p(w.wx).transpose() * da;
  }

  StepCache step(const Matrix& obs, const std::vector<Matrix>& h_prev) const {
    const NetworkConfig& cfg = net_.config_;
    StepCache c;
    c.rays = obs.topRows(cfg.rays);
    c.pose = obs.bottomRows(NetworkConfig::kPoseInputs);
    Matrix v = p(net_.enc_v_w_) * c.rays;
    add_bias(v, p(net_.enc_v_b_));
    c.phv = v.array().tanh().matrix();
    Matrix pp = p(net_.enc_p_w_) * c.pose;
    add_bias(pp, p(net_.enc_p_b_));
    c.phf.resize(cfg.feature_dim(), obs.cols());
    c.phf << c.phv, pp;
    for (std::size_t i = 0; i < net_.beliefs_.size(); ++i)
      c.gru.push_back(gru(net_.beliefs_[i], c.phf, h_prev[i]));
    c.key = p(net_.key_w_) * c.phf;
    add_bias(c.key, p(net_.key_b_));
    const Eigen::Index nb = static_cast<Eigen::Index>(c.gru.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_));
    Matrix scores(nb, obs.cols());
    for (Eigen::Index i = 0; i < nb; ++i)
      scores.row(i) = c.gru[i].h.cwiseProduct(c.key).colwise().sum() * scale;
    c.weights.resize(nb, obs.cols());
    for (Eigen::Index col = 0; col < obs.cols(); ++col) {
      const double mx = scores.col(col).maxCoeff();
      const Vector e = (scores.col(col).array() - mx).exp().matrix();
      c.weights.col(col) = e / e.sum();
    }
    c.fused = Matrix::Zero(d_, obs.cols());
    for (Eigen::Index i = 0; i < nb; ++i)
      c.fused += (c.gru[i].h.array().rowwise() * c.weights.row(i).array()).matrix();
    c.out = p(net_.head_w_) * c.fused;
    add_bias(c.out, p(net_.head_b_));
    return c;
  }

  // d_out -> parameter gradients; adds d h^(i) into dh and returns d phi_f.
  Matrix step_backward(const StepCache& c, const Matrix& d_out, std::vector<Matrix>& dh) const {
    const Eigen::Index nb = static_cast<Eigen::Index>(c.gru.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_));
    g(net_.head_w_).noalias() += d_out * c.fused.transpose();
    g(net_.head_b_).col(0) += d_out.rowwise().sum();
    const Matrix dfused = p(net_.head_w_).transpose() * d_out;
    Matrix dw(nb, d_out.cols());
    for (Eigen::Index i = 0; i < nb; ++i) {
      dw.row(i) = dfused.cwiseProduct(c.gru[i].h).colwise().sum();
      dh[i] += (dfused.array().rowwise() * c.weights.row(i).array()).matrix();
    }
    const Eigen::RowVectorXd inner = c.weights.cwiseProduct(dw).colwise().sum();
    Matrix dkey = Matrix::Zero(d_, d_out.cols());
    for (Eigen::Index i = 0; i < nb; ++i) {
      const Eigen::RowVectorXd ds =
          c.weights.row(i).cwiseProduct(dw.row(i) - inner) * scale;
      dh[i] += (c.key.array().rowwise() * ds.array()).matrix();
      dkey += (c.gru[i].h.array().rowwise() * ds.array()).matrix();
    }
    g(net_.key_w_).noalias() += dkey * c.phf.transpose();
    g(net_.key_b_).col(0) += dkey.rowwise().sum();
    return p(net_.key_w_).transpose() * dkey;
  }

  void encoder_backward(const StepCache& c, const Matrix& dphf) const {
    const NetworkConfig& cfg = net_.config_;
    const Matrix dv =
        (dphf.topRows(cfg.visual_dim).array() * (1.0 - c.phv.array().square())).matrix();
    g(net_.enc_v_w_).noalias() += dv * c.rays.transpose();
    g(net_.enc_v_b_).col(0) += dv.rowwise().sum();
    const auto dp = dphf.bottomRows(cfg.pose_dim);
    g(net_.enc_p_w_).noalias() += dp * c.pose.transpose();
    g(net_.enc_p_b_).col(0) += dp.rowwise().sum();
  }

  struct RegressorCache {
    std::vector<Matrix> actions;
    std::vector<GruCache> gru;
    std::vector<Matrix> pred;
  };

  RegressorCache regressor(int task, const Matrix& h, const std::vector<Matrix>& actions) const {
    const Network::Regressor& r = net_.regressors_[static_cast<std::size_t>(task)];
    RegressorCache c;
    c.actions = actions;
    Matrix state = h;
    for (const Matrix& a : actions) {
      Matrix x = p(r.embed_w) * a;
      add_bias(x, p(r.embed_b));
      c.gru.push_back(gru(r.gru, x, state));
      state = c.gru.back().h;
      Matrix s = p(r.out_w) * state;
      add_bias(s, p(r.out_b));
      c.pred.push_back(std::move(s));
    }
    return c;
  }

  // Returns d h (the initial regressor state).
  Matrix regressor_backward(int task, const RegressorCache& c, const std::vector<Matrix>& dpred) const {
    const Network::Regressor& r = net_.regressors_[static_cast<std::size_t>(task)];
    Matrix carry = Matrix::Zero(d_, dpred.front().cols());
    for (std::size_t j = c.gru.size(); j-- > 0;) {
      g(r.out_w).noalias() += dpred[j] * c.gru[j].h.transpose();
      g(r.out_b).col(0) += dpred[j].rowwise().sum();
      carry.noalias() += p(r.out_w).transpose() * dpred[j];
      const Matrix dx = gru_backward(r.gru, c.gru[j], carry);
      g(r.embed_w).noalias() += dx * c.actions[j].transpose();
      g(r.embed_b).col(0) += dx.rowwise().sum();
    }
    return carry;
  }

 private:
  const Network& net_;
  Vector* grad_;
  int d_;
};

Vector Network::encode(const Vector& obs) const {
  if (obs.size() != config_.obs_dim()) throw InputError("encode: observation size mismatch");
  Forward f(*this, nullptr);
  std::vector<Matrix> h(beliefs_.size(), Matrix::Zero(config_.belief_dim, 1));
  return f.step(obs, h).phf.col(0);
}

StepOutput Network::step(const std::vector<Vector>& beliefs, const Vector& obs) const {
  if (obs.size() != config_.obs_dim()) throw InputError("step: observation size mismatch");
  if (beliefs.size() != beliefs_.size()) throw InputError("step: belief count mismatch");
  Forward f(*this, nullptr);
  std::vector<Matrix> h(beliefs.begin(), beliefs.end());
  const StepCache c = f.step(obs, h);
  StepOutput out;
  out.mu = c.out.block(0, 0, 2, 1);
  out.sigma = sigma_of(c.out, 0);
  out.value = c.out(4, 0);
  for (const GruCache& g : c.gru) out.beliefs.push_back(g.h.col(0));
  out.weights = c.weights.col(0);
  out.fused = c.fused.col(0);
  return out;
}

Matrix Network::predict(int task_index, const Vector& h, const Matrix& actions) const {
  if (task_index < 0 || task_index >= config_.beliefs()) throw InputError("predict: bad task index");
  if (actions.rows() != 2 || actions.cols() != config_.horizon + 1)
    throw InputError("predict: expected 2 x (horizon + 1) actions");
  if (h.size() != config_.belief_dim) throw InputError("predict: belief size mismatch");
  Forward f(*this, nullptr);
  std::vector<Matrix> acts;
  for (Eigen::Index j = 0; j < actions.cols(); ++j) acts.emplace_back(actions.col(j));
  const auto c = f.regressor(task_index, h, acts);
  const int o = config_.task_outputs(config_.tasks[static_cast<std::size_t>(task_index)]);
  Matrix out(actions.cols(), o);
  for (Eigen::Index j = 0; j < actions.cols(); ++j) out.row(j) = c.pred[j].col(0).transpose();
  return out;
}

namespace {

void check_batch(const NetworkConfig& cfg, const SequenceBatch& b) {
  const int T = b.steps();
  const int B = b.width();
  if (T == 0 || B == 0) throw InputError("loss: empty batch");
  auto shape = [](const Matrix& m, Eigen::Index r, Eigen::Index c) { return m.rows() == r && m.cols() == c; };
  bool ok = shape(b.mask, T, B) && shape(b.advantages, T, B) && shape(b.returns, T, B) &&
            shape(b.risk, T, B) && b.actions.size() == static_cast<std::size_t>(T) &&
            b.aux_actions.size() == static_cast<std::size_t>(T) &&
            b.compass.size() == static_cast<std::size_t>(T) &&
            b.h0.size() == static_cast<std::size_t>(cfg.beliefs());
  for (int t = 0; ok && t < T; ++t)
    ok = shape(b.obs[t], cfg.obs_dim(), B) && shape(b.actions[t], 2, B) &&
         shape(b.aux_actions[t], 2, B) && shape(b.compass[t], cfg.sectors, B);
  for (const Matrix& h : b.h0) ok = ok && shape(h, cfg.belief_dim, B);
  if (!ok) throw InputError("loss: batch shapes do not match the network");
  for (int col = 0; col < B; ++col)
    for (int t = 1; t < T; ++t)
      if (b.mask(t, col) > 0.0 && b.mask(t - 1, col) == 0.0)
        throw InputError("loss: padding must trail the valid steps");
}

}  // namespace

LossBreakdown Network::loss(const SequenceBatch& batch, const LossWeights& w, Vector* grad) const {
  check_batch(config_, batch);
  if (grad) *grad = Vector::Zero(params_.size());
  Forward f(*this, grad);
  const int T = batch.steps();
  const int B = batch.width();
  const int d = config_.belief_dim;
  const std::size_t nb = beliefs_.size();
  const int k = config_.horizon;

  std::vector<StepCache> caches;
  caches.reserve(static_cast<std::size_t>(T));
  std::vector<Matrix> h = batch.h0;
  for (int t = 0; t < T; ++t) {
    caches.push_back(f.step(batch.obs[t], h));
    for (std::size_t i = 0; i < nb; ++i) h[i] = caches.back().gru[i].h;
  }

  LossBreakdown out;
  out.aux.assign(nb, 0.0);
  const double n_steps = batch.mask.sum();
  out.steps = static_cast<int>(n_steps);
  std::vector<Matrix> d_out(static_cast<std::size_t>(T), Matrix::Zero(5, B));
  const double half_log_2pi_e = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  if (n_steps > 0.0) {
    for (int t = 0; t < T; ++t) {
      const Matrix& o = caches[t].out;
      for (int col = 0; col < B; ++col) {
        if (batch.mask(t, col) <= 0.0) continue;
        const Eigen::Vector2d mu = o.block(0, col, 2, 1);
        const Eigen::Vector2d sigma = sigma_of(o, col);
        const Eigen::Vector2d u = batch.actions[t].col(col);
        const double adv = batch.advantages(t, col);
        const double ret = batch.returns(t, col);
        const double v = o(4, col);
        out.policy += -adv * gaussian_log_prob(u, mu, sigma);
        out.value += 0.5 * (v - ret) * (v - ret);
        out.entropy += std::log(sigma[0]) + std::log(sigma[1]) + 2.0 * half_log_2pi_e;
        const double cp = -w.policy * adv / n_steps;  // d loss / d log pi
        const double ce = -w.entropy / n_steps;       // d loss / d entropy
        for (int c = 0; c < 2; ++c) {
          const double diff = u[c] - mu[c];
          const double s = sigma[c];
          d_out[t](c, col) = cp * diff / (s * s);
          const double dsigma = cp * (diff * diff / (s * s * s) - 1.0 / s) + ce / s;
          d_out[t](2 + c, col) = dsigma * logistic(o(2 + c, col));
        }
        d_out[t](4, col) = w.value * (v - ret) / n_steps;
      }
    }
    out.policy /= n_steps;
    out.value /= n_steps;
    out.entropy /= n_steps;
  }

  // Auxiliary windows [t, t + k] that lie inside the valid part of a column.
  std::vector<std::pair<int, int>> windows;
  for (int col = 0; col < B; ++col)
    for (int t = 0; t + k < T; ++t)
      if (batch.mask(t + k, col) > 0.0) windows.emplace_back(t, col);
  out.aux_windows = static_cast<int>(windows.size());
  std::vector<std::vector<Matrix>> inject;
  if (grad) inject.assign(static_cast<std::size_t>(T), std::vector<Matrix>(nb, Matrix::Zero(d, B)));
  if (!windows.empty()) {
    const Eigen::Index nw = static_cast<Eigen::Index>(windows.size());
    for (std::size_t task = 0; task < nb; ++task) {
      const Task kind = config_.tasks[task];
      const int o = config_.task_outputs(kind);
      Matrix h_start(d, nw);
      std::vector<Matrix> acts(static_cast<std::size_t>(k + 1), Matrix(2, nw));
      std::vector<Matrix> truth(static_cast<std::size_t>(k + 1), Matrix(o, nw));
      for (Eigen::Index n = 0; n < nw; ++n) {
        const auto [t, col] = windows[static_cast<std::size_t>(n)];
        h_start.col(n) = caches[t].gru[task].h.col(col);
        for (int j = 0; j <= k; ++j) {
          acts[j].col(n) = batch.aux_actions[t + j].col(col);
          if (kind == Task::Risk)
            truth[j](0, n) = batch.risk(t + j, col);
          else
            truth[j].col(n) = batch.compass[t + j].col(col);
        }
      }
      const auto rc = f.regressor(static_cast<int>(task), h_start, acts);
      double sum = 0.0;
      std::vector<Matrix> dpred;
      const double scale = 1.0 / (static_cast<double>(o) * k * static_cast<double>(nw));
      for (int j = 0; j <= k; ++j) {
        const Matrix diff = rc.pred[j] - truth[j];
        sum += diff.squaredNorm();
        dpred.push_back(diff * (2.0 * w.aux * scale));
      }
      out.aux[task] = sum * scale;
      if (grad) {
        const Matrix dh = f.regressor_backward(static_cast<int>(task), rc, dpred);
        for (Eigen::Index n = 0; n < nw; ++n) {
          const auto [t, col] = windows[static_cast<std::size_t>(n)];
          inject[t][task].col(col) += dh.col(n);
        }
      }
    }
  }
  double aux_sum = 0.0;
  for (double a : out.aux) aux_sum += a;
  out.total = w.policy * out.policy + w.value * out.value - w.entropy * out.entropy + w.aux * aux_sum;
  if (!grad) return out;

  std::vector<Matrix> carry(nb, Matrix::Zero(d, B));
  for (int t = T - 1; t >= 0; --t) {
    std::vector<Matrix> dh = inject[t];
    Matrix dphf = f.step_backward(caches[t], d_out[t], dh);
    for (std::size_t i = 0; i < nb; ++i) {
      dh[i] += carry[i];
      dphf += f.gru_backward(beliefs_[i], caches[t].gru[i], dh[i]);
      carry[i] = std::move(dh[i]);
    }
    f.encoder_backward(caches[t], dphf);
  }
  return out;
}

}  // namespace socnav::policy
