#include <cmath>

#include "crl/common.hpp"
#include "crl/notears.hpp"

namespace crl {

Matrix matrix_exponential(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("matrix_exponential: matrix must be square");
  const Eigen::Index d = a.rows();
  if (d == 0) return Matrix(0, 0);
  if (!a.allFinite()) throw Error("matrix_exponential: non-finite entry");

  // Scale so the 1-norm is at most 1/2; the Taylor remainder after k terms is then
  // bounded by 2 * 0.5^(k+1) / (k+1)!.
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(d, d);
  Matrix term = Matrix::Identity(d, d);
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

double acyclicity_h(const Matrix& w) {
  const Matrix e = matrix_exponential(w.cwiseProduct(w));
  return e.trace() - static_cast<double>(w.rows());
}

Matrix acyclicity_grad(const Matrix& w) {
  const Matrix e = matrix_exponential(w.cwiseProduct(w));
  return e.transpose().cwiseProduct(2.0 * w);
}

LossGrad least_squares_loss_grad(const Matrix& x, const Matrix& w) {
  if (w.rows() != w.cols()) throw Error("least_squares_loss_grad: W must be square");
  if (x.cols() != w.rows()) throw Error("least_squares_loss_grad: column count of X differs from d");
  if (x.rows() < 1) throw Error("least_squares_loss_grad: need at least one sample");
  const double n = static_cast<double>(x.rows());
  const Matrix residual = x - x * w;
  LossGrad out;
  out.loss = 0.5 / n * residual.squaredNorm();
  out.grad = -1.0 / n * (x.transpose() * residual);
  out.grad.diagonal().setZero();
  return out;
}

}  // namespace crl
