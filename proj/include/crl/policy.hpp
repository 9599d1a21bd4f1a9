#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "crl/notears.hpp"

namespace crl {

using Vector = Eigen::VectorXd;

/// Shared two-layer tanh trunk with a softmax action head and a scalar value head.
/// Tensor order: W1, b1, W2, b2, W_pi, b_pi, W_v, b_v (biases are column vectors).
struct PolicyParams {
  std::vector<Matrix> tensors;

  enum Slot : std::size_t { W1, B1, W2, B2, WPi, BPi, WV, BV, kSlots };

  static PolicyParams init(int input_width, std::uint64_t seed, int hidden1 = 64, int hidden2 = 64,
                           int actions = 4);
  static PolicyParams zeros_like(const PolicyParams& p);

  int input_width() const { return static_cast<int>(tensors[W1].cols()); }
  int action_count() const { return static_cast<int>(tensors[WPi].rows()); }
  Eigen::Index parameter_count() const;

  Vector flatten() const;
  void assign(const Vector& flat);
  bool all_finite() const;

  bool operator==(const PolicyParams& o) const;
};

struct PolicyOutput {
  Vector probs;
  double value = 0.0;
};

PolicyOutput policy_value_forward(const PolicyParams& p, const Vector& observation);

/// Column-per-sample batch forward, keeping what the backward pass needs.
struct ForwardCache {
  Matrix input, hidden1, hidden2, log_probs, probs;
  Eigen::RowVectorXd values;
};

ForwardCache forward_batch(const PolicyParams& p, const Matrix& observations);

/// Backward pass given dLoss/dlogits (actions x N) and dLoss/dvalue (1 x N).
PolicyParams backward_batch(const PolicyParams& p, const ForwardCache& cache, const Matrix& d_logits,
                            const Eigen::RowVectorXd& d_values);

}  // namespace crl
