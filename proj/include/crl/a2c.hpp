#pragma once

#include <vector>

#include "crl/policy.hpp"

namespace crl {

struct A2cHyper {
  double gamma = 0.995;
  int n_steps = 100;
  double ent_coef = 0.002;
  double vf_coef = 0.5;
  double max_grad_norm = 1.0;
  double lr = 3e-4;
  double adam_eps = 1e-7;
  double beta1 = 0.9;
  double beta2 = 0.999;
  bool normalize_advantages = false;

  void validate() const;
};

/// Per-env step sequences gathered between two updates.
class RolloutBuffer {
 public:
  RolloutBuffer(int n_envs, int n_steps);

  void add(int env, const Vector& observation, int action, double reward, bool done, double value);
  bool full() const;
  void clear();

  int n_envs() const { return n_envs_; }
  int n_steps() const { return n_steps_; }

  struct Sequence {
    std::vector<Vector> observations;
    std::vector<int> actions;
    std::vector<double> rewards;
    std::vector<bool> dones;  // episode ended on this step
    std::vector<double> values;
  };
  const Sequence& sequence(int env) const { return seqs_.at(static_cast<std::size_t>(env)); }

 private:
  int n_envs_, n_steps_;
  std::vector<Sequence> seqs_;
};

struct ReturnsAdvantages {
  std::vector<std::vector<double>> returns;     // [env][t]
  std::vector<std::vector<double>> advantages;  // [env][t]
};

/// R_t = r_t + gamma * (1 - done_t) * R_{t+1}, with R_n = bootstrap (the critic's value of the
/// state following the last step).
std::vector<double> discounted_returns(const std::vector<double>& rewards, const std::vector<bool>& dones,
                                       double bootstrap, double gamma);

ReturnsAdvantages compute_returns_advantages(const RolloutBuffer& b, const std::vector<double>& bootstrap_values,
                                             double gamma);

struct LossReport {
  double total = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double grad_norm = 0.0;  // before clipping
};

/// A batch flattened in env-major order.
struct A2cBatch {
  Matrix observations;  // width x N
  std::vector<int> actions;
  Eigen::RowVectorXd returns;
  Eigen::RowVectorXd advantages;
};

A2cBatch flatten_batch(const RolloutBuffer& b, const ReturnsAdvantages& ra, bool normalize_advantages);

/// Loss  -mean(A log pi(a|s)) + vf_coef mean((R - V)^2) - ent_coef mean(H)  and its exact gradient.
/// Advantages are constants.
LossReport a2c_loss(const PolicyParams& p, const A2cBatch& batch, const A2cHyper& h, PolicyParams* grad);

double global_norm(const PolicyParams& g);
/// Rescales in place so the global norm is at most max_norm; returns the norm before.
double clip_global_norm(PolicyParams& g, double max_norm);

struct OptimizerState {
  std::vector<Matrix> m, v;
  long long step = 0;
  double lr = 3e-4;
  double eps = 1e-7;
  double beta1 = 0.9;
  double beta2 = 0.999;

  static OptimizerState for_params(const PolicyParams& p, const A2cHyper& h);
  bool operator==(const OptimizerState&) const;
};

void adam_step(PolicyParams& p, const PolicyParams& grad, OptimizerState& opt);

/// One clipped Adam update on the buffer. Throws on a non-finite loss or gradient, leaving
/// `p` and `opt` untouched.
LossReport a2c_update(PolicyParams& p, OptimizerState& opt, const RolloutBuffer& b,
                      const std::vector<double>& bootstrap_values, const A2cHyper& h);

/// Entropy of a distribution, natural log.
double entropy(const Vector& probs);

}  // namespace crl
