#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crl/graphs.hpp"

namespace crl {

using Matrix = Eigen::MatrixXd;

/// e^A by scaling and squaring around a truncated Taylor series.
Matrix matrix_exponential(const Matrix& a);

/// Smooth acyclicity measure h(W) = tr(exp(W∘W)) - d; zero exactly on DAG weight matrices.
double acyclicity_h(const Matrix& w);

/// Gradient of acyclicity_h: exp(W∘W)^T ∘ 2W.
Matrix acyclicity_grad(const Matrix& w);

struct LossGrad {
  double loss = 0.0;
  Matrix grad;
};

/// Least-squares score (1/2n)||X - XW||_F^2 and its gradient -(1/n) X^T (X - XW).
/// The returned gradient has a zero diagonal.
LossGrad least_squares_loss_grad(const Matrix& x, const Matrix& w);

struct NotearsConfig {
  double lambda1 = 0.1;
  double w_threshold = 0.3;
  int max_dual_iter = 100;
  double h_tol = 1e-8;
  double rho_max = 1e16;
  int max_inner_iter = 500;
  double inner_gtol = 1e-9;
  double inner_ftol = 1e-12;
  int lbfgs_memory = 10;
  // Subtract column means before fitting.
  bool center = false;
  // Extra L1 weight on edges pointing from a later column to an earlier one. Only acts
  // when two orientations score identically, e.g. duplicated columns.
  double tie_break = 1e-9;

  void validate() const;
};

struct NotearsResult {
  Matrix weights;        // before thresholding
  DirectedGraph graph;   // |w_ij| > threshold, acyclic
  double final_h = 0.0;  // h of the unthresholded weights
  bool converged = false;
  std::vector<double> outer_h;  // h after each accepted dual step
};

/// Fits a linear structural equation model with the acyclicity constraint enforced by an
/// augmented Lagrangian. `labels` defaults to x0, x1, ... when empty.
NotearsResult fit_notears(const Matrix& x, const NotearsConfig& cfg,
                          std::vector<std::string> labels = {});

}  // namespace crl
