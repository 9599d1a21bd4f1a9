#include "crl/a2c.hpp"

#include <cmath>

#include <fmt/format.h>

#include "crl/common.hpp"

namespace crl {

void A2cHyper::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("a2c: gamma must lie in [0, 1]");
  if (n_steps < 1) throw Error("a2c: n_steps must be positive");
  if (!(ent_coef >= 0.0) || !(vf_coef >= 0.0)) throw Error("a2c: loss coefficients must be non-negative");
  if (!(max_grad_norm > 0.0)) throw Error("a2c: max_grad_norm must be positive");
  if (!(lr > 0.0) || !(adam_eps > 0.0)) throw Error("a2c: lr and adam_eps must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw Error("a2c: betas must lie in [0, 1)");
}

RolloutBuffer::RolloutBuffer(int n_envs, int n_steps) : n_envs_(n_envs), n_steps_(n_steps) {
  if (n_envs < 1 || n_steps < 1) throw Error("RolloutBuffer: sizes must be positive");
  seqs_.resize(static_cast<std::size_t>(n_envs));
}

void RolloutBuffer::add(int env, const Vector& observation, int action, double reward, bool done, double value) {
  auto& s = seqs_.at(static_cast<std::size_t>(env));
  if (static_cast<int>(s.actions.size()) >= n_steps_) throw Error(fmt::format("RolloutBuffer: env {} already full", env));
  s.observations.push_back(observation);
  s.actions.push_back(action);
  s.rewards.push_back(reward);
  s.dones.push_back(done);
  s.values.push_back(value);
}

bool RolloutBuffer::full() const {
  for (const auto& s : seqs_)
    if (static_cast<int>(s.actions.size()) != n_steps_) return false;
  return true;
}

void RolloutBuffer::clear() {
  for (auto& s : seqs_) s = Sequence{};
}

std::vector<double> discounted_returns(const std::vector<double>& rewards, const std::vector<bool>& dones,
                                       double bootstrap, double gamma) {
  if (rewards.size() != dones.size()) throw Error("discounted_returns: length mismatch");
  std::vector<double> out(rewards.size());
  double next = bootstrap;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    next = rewards[i] + (dones[i] ? 0.0 : gamma * next);
    out[i] = next;
  }
  return out;
}

ReturnsAdvantages compute_returns_advantages(const RolloutBuffer& b, const std::vector<double>& bootstrap_values,
                                             double gamma) {
  if (!b.full()) throw Error("compute_returns_advantages: buffer not full");
  if (static_cast<int>(bootstrap_values.size()) != b.n_envs())
    throw Error("compute_returns_advantages: one bootstrap value per env required");
  ReturnsAdvantages ra;
  for (int e = 0; e < b.n_envs(); ++e) {
    const auto& s = b.sequence(e);
    auto r = discounted_returns(s.rewards, s.dones, bootstrap_values[static_cast<std::size_t>(e)], gamma);
    std::vector<double> adv(r.size());
    for (std::size_t t = 0; t < r.size(); ++t) adv[t] = r[t] - s.values[t];
    ra.returns.push_back(std::move(r));
    ra.advantages.push_back(std::move(adv));
  }
  return ra;
}

A2cBatch flatten_batch(const RolloutBuffer& b, const ReturnsAdvantages& ra, bool normalize_advantages) {
  const int n = b.n_envs() * b.n_steps();
  const auto width = b.sequence(0).observations.at(0).size();
  A2cBatch batch;
  batch.observations.resize(width, n);
  batch.actions.resize(static_cast<std::size_t>(n));
  batch.returns.resize(n);
  batch.advantages.resize(n);
  int k = 0;
  for (int e = 0; e < b.n_envs(); ++e) {
    const auto& s = b.sequence(e);
    for (int t = 0; t < b.n_steps(); ++t, ++k) {
      batch.observations.col(k) = s.observations[static_cast<std::size_t>(t)];
      batch.actions[static_cast<std::size_t>(k)] = s.actions[static_cast<std::size_t>(t)];
      batch.returns(k) = ra.returns[static_cast<std::size_t>(e)][static_cast<std::size_t>(t)];
      batch.advantages(k) = ra.advantages[static_cast<std::size_t>(e)][static_cast<std::size_t>(t)];
    }
  }
  if (normalize_advantages && n > 1) {
    const double mean = batch.advantages.mean();
    const double var = (batch.advantages.array() - mean).square().sum() / (n - 1);
    batch.advantages = (batch.advantages.array() - mean) / (std::sqrt(var) + 1e-8);
  }
  return batch;
}

double entropy(const Vector& probs) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i)
    if (probs(i) > 0.0) h -= probs(i) * std::log(probs(i));
  return h;
}

LossReport a2c_loss(const PolicyParams& p, const A2cBatch& batch, const A2cHyper& h, PolicyParams* grad) {
  const auto n = batch.observations.cols();
  if (n == 0) throw Error("a2c_loss: empty batch");
  if (static_cast<Eigen::Index>(batch.actions.size()) != n || batch.returns.size() != n ||
      batch.advantages.size() != n)
    throw Error("a2c_loss: batch fields disagree in length");
  const ForwardCache c = forward_batch(p, batch.observations);
  const int k = p.action_count();
  const double inv_n = 1.0 / static_cast<double>(n);

  LossReport rep;
  Matrix d_logits(k, n);
  Eigen::RowVectorXd d_values(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const int a = batch.actions[static_cast<std::size_t>(j)];
    if (a < 0 || a >= k) throw Error(fmt::format("a2c_loss: action {} out of range", a));
    const double adv = batch.advantages(j);
    const auto logp = c.log_probs.col(j);
    const auto pr = c.probs.col(j);
    // Entropy from log-probs keeps it finite when a probability underflows.
    const double ent = -(pr.array() * logp.array()).sum();
    rep.policy_loss -= adv * logp(a) * inv_n;
    rep.entropy += ent * inv_n;
    const double err = batch.returns(j) - c.values(j);
    rep.value_loss += err * err * inv_n;

    // d(-A log p_a)/dz = -A (onehot - p);  dH/dz_i = -p_i (log p_i + H)
    for (int i = 0; i < k; ++i) {
      const double onehot = i == a ? 1.0 : 0.0;
      const double d_pg = -adv * (onehot - pr(i));
      const double d_ent = -pr(i) * (logp(i) + ent);
      d_logits(i, j) = (d_pg - h.ent_coef * d_ent) * inv_n;
    }
    d_values(j) = h.vf_coef * 2.0 * (c.values(j) - batch.returns(j)) * inv_n;
  }
  rep.total = rep.policy_loss + h.vf_coef * rep.value_loss - h.ent_coef * rep.entropy;
  if (grad) *grad = backward_batch(p, c, d_logits, d_values);
  return rep;
}

double global_norm(const PolicyParams& g) {
  double sq = 0.0;
  for (const auto& t : g.tensors) sq += t.squaredNorm();
  return std::sqrt(sq);
}

double clip_global_norm(PolicyParams& g, double max_norm) {
  const double norm = global_norm(g);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& t : g.tensors) t *= scale;
  }
  return norm;
}

OptimizerState OptimizerState::for_params(const PolicyParams& p, const A2cHyper& h) {
  OptimizerState o;
  for (const auto& t : p.tensors) {
    o.m.push_back(Matrix::Zero(t.rows(), t.cols()));
    o.v.push_back(Matrix::Zero(t.rows(), t.cols()));
  }
  o.lr = h.lr;
  o.eps = h.adam_eps;
  o.beta1 = h.beta1;
  o.beta2 = h.beta2;
  return o;
}

bool OptimizerState::operator==(const OptimizerState& o) const {
  if (step != o.step || lr != o.lr || eps != o.eps || beta1 != o.beta1 || beta2 != o.beta2) return false;
  if (m.size() != o.m.size() || v.size() != o.v.size()) return false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].rows() != o.m[i].rows() || m[i].cols() != o.m[i].cols() || m[i] != o.m[i]) return false;
    if (v[i].rows() != o.v[i].rows() || v[i].cols() != o.v[i].cols() || v[i] != o.v[i]) return false;
  }
  return true;
}

void adam_step(PolicyParams& p, const PolicyParams& grad, OptimizerState& opt) {
  if (opt.m.size() != p.tensors.size() || grad.tensors.size() != p.tensors.size())
    throw Error("adam_step: optimizer state does not match parameters");
  ++opt.step;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  for (std::size_t i = 0; i < p.tensors.size(); ++i) {
    auto& m = opt.m[i];
    auto& v = opt.v[i];
    const auto& g = grad.tensors[i];
    if (m.rows() != g.rows() || m.cols() != g.cols()) throw Error("adam_step: moment shape mismatch");
    m = opt.beta1 * m + (1.0 - opt.beta1) * g;
    v = opt.beta2 * v + (1.0 - opt.beta2) * g.cwiseProduct(g);
    p.tensors[i].array() -= opt.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + opt.eps);
  }
}

LossReport a2c_update(PolicyParams& p, OptimizerState& opt, const RolloutBuffer& b,
                      const std::vector<double>& bootstrap_values, const A2cHyper& h) {
  const auto ra = compute_returns_advantages(b, bootstrap_values, h.gamma);
  const auto batch = flatten_batch(b, ra, h.normalize_advantages);
  PolicyParams grad;
  LossReport rep = a2c_loss(p, batch, h, &grad);
  rep.grad_norm = global_norm(grad);
  if (!std::isfinite(rep.total) || !std::isfinite(rep.grad_norm))
    throw Error(fmt::format("a2c_update: non-finite loss (policy {}, value {}, entropy {}, grad norm {})",
                            rep.policy_loss, rep.value_loss, rep.entropy, rep.grad_norm));
  clip_global_norm(grad, h.max_grad_norm);
  adam_step(p, grad, opt);
  return rep;
}

}  // namespace crl
