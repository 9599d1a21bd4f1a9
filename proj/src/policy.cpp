#include "crl/policy.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "crl/common.hpp"

namespace crl {

namespace {

double standard_normal(Rng& rng) {
  // Box-Muller on the portable uniform generator.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix orthogonal(int rows, int cols, double gain, Rng& rng) {
  const int big = std::max(rows, cols), small = std::min(rows, cols);
  Matrix g(big, small);
  for (int j = 0; j < small; ++j)
    for (int i = 0; i < big; ++i) g(i, j) = standard_normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(big, small);
  // Sign fix makes the decomposition unique.
  const Matrix r = qr.matrixQR();
  for (int j = 0; j < small; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  Matrix out = rows >= cols ? q : Matrix(q.transpose());
  return gain * out;
}

}  // namespace

PolicyParams PolicyParams::init(int input_width, std::uint64_t seed, int hidden1, int hidden2, int actions) {
  if (input_width < 1 || hidden1 < 1 || hidden2 < 1 || actions < 1) throw Error("PolicyParams::init: bad layer sizes");
  Rng rng(seed);
  PolicyParams p;
  p.tensors.resize(kSlots);
  p.tensors[W1] = orthogonal(hidden1, input_width, std::sqrt(2.0), rng);
  p.tensors[B1] = Matrix::Zero(hidden1, 1);
  p.tensors[W2] = orthogonal(hidden2, hidden1, std::sqrt(2.0), rng);
  p.tensors[B2] = Matrix::Zero(hidden2, 1);
  p.tensors[WPi] = orthogonal(actions, hidden2, 0.01, rng);
  p.tensors[BPi] = Matrix::Zero(actions, 1);
  p.tensors[WV] = orthogonal(1, hidden2, 1.0, rng);
  p.tensors[BV] = Matrix::Zero(1, 1);
  return p;
}

PolicyParams PolicyParams::zeros_like(const PolicyParams& p) {
  PolicyParams z;
  for (const auto& t : p.tensors) z.tensors.push_back(Matrix::Zero(t.rows(), t.cols()));
  return z;
}

Eigen::Index PolicyParams::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

Vector PolicyParams::flatten() const {
  Vector flat(parameter_count());
  Eigen::Index k = 0;
  for (const auto& t : tensors) {
    flat.segment(k, t.size()) = Eigen::Map<const Vector>(t.data(), t.size());
    k += t.size();
  }
  return flat;
}

void PolicyParams::assign(const Vector& flat) {
  if (flat.size() != parameter_count()) throw Error("PolicyParams::assign: size mismatch");
  Eigen::Index k = 0;
  for (auto& t : tensors) {
    Eigen::Map<Vector>(t.data(), t.size()) = flat.segment(k, t.size());
    k += t.size();
  }
}

bool PolicyParams::all_finite() const {
  for (const auto& t : tensors)
    if (!t.allFinite()) return false;
  return true;
}

bool PolicyParams::operator==(const PolicyParams& o) const {
  if (tensors.size() != o.tensors.size()) return false;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (tensors[i].rows() != o.tensors[i].rows() || tensors[i].cols() != o.tensors[i].cols()) return false;
    if (tensors[i] != o.tensors[i]) return false;
  }
  return true;
}

ForwardCache forward_batch(const PolicyParams& p, const Matrix& observations) {
  if (observations.rows() != p.input_width())
    throw Error(fmt::format("policy: observation width {} differs from network input {}", observations.rows(),
                            p.input_width()));
  ForwardCache c;
  c.input = observations;
  c.hidden1 = ((p.tensors[PolicyParams::W1] * observations).colwise() + p.tensors[PolicyParams::B1].col(0))
                  .array()
                  .tanh()
                  .matrix();
  c.hidden2 = ((p.tensors[PolicyParams::W2] * c.hidden1).colwise() + p.tensors[PolicyParams::B2].col(0))
                  .array()
                  .tanh()
                  .matrix();
  const Matrix logits = (p.tensors[PolicyParams::WPi] * c.hidden2).colwise() + p.tensors[PolicyParams::BPi].col(0);
  c.log_probs.resize(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const double mx = logits.col(j).maxCoeff();
    const double lse = mx + std::log((logits.col(j).array() - mx).exp().sum());
    c.log_probs.col(j) = logits.col(j).array() - lse;
  }
  c.probs = c.log_probs.array().exp().matrix();
  c.values = (p.tensors[PolicyParams::WV] * c.hidden2).array() + p.tensors[PolicyParams::BV](0, 0);
  return c;
}

PolicyOutput policy_value_forward(const PolicyParams& p, const Vector& observation) {
  const ForwardCache c = forward_batch(p, observation);
  return {c.probs.col(0), c.values(0)};
}

PolicyParams backward_batch(const PolicyParams& p, const ForwardCache& c, const Matrix& d_logits,
                            const Eigen::RowVectorXd& d_values) {
  PolicyParams g;
  g.tensors.resize(PolicyParams::kSlots);
  g.tensors[PolicyParams::WPi] = d_logits * c.hidden2.transpose();
  g.tensors[PolicyParams::BPi] = d_logits.rowwise().sum();
  g.tensors[PolicyParams::WV] = d_values * c.hidden2.transpose();
  g.tensors[PolicyParams::BV] = Matrix::Constant(1, 1, d_values.sum());
  const Matrix d_hidden2 = p.tensors[PolicyParams::WPi].transpose() * d_logits +
                           p.tensors[PolicyParams::WV].transpose() * d_values;
  const Matrix d_z2 = d_hidden2.cwiseProduct((1.0 - c.hidden2.array().square()).matrix());
  g.tensors[PolicyParams::W2] = d_z2 * c.hidden1.transpose();
  g.tensors[PolicyParams::B2] = d_z2.rowwise().sum();
  const Matrix d_z1 = (p.tensors[PolicyParams::W2].transpose() * d_z2)
                          .cwiseProduct((1.0 - c.hidden1.array().square()).matrix());
  g.tensors[PolicyParams::W1] = d_z1 * c.input.transpose();
  g.tensors[PolicyParams::B1] = d_z1.rowwise().sum();
  return g;
}

}  // namespace crl
