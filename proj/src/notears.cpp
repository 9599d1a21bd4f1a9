#include "crl/notears.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <fmt/format.h>

#include "crl/common.hpp"

namespace crl {

void NotearsConfig::validate() const {
  if (!(lambda1 >= 0.0)) throw Error("NotearsConfig: lambda1 must be >= 0");
  if (!(w_threshold >= 0.0)) throw Error("NotearsConfig: w_threshold must be >= 0");
  if (!(h_tol > 0.0)) throw Error("NotearsConfig: h_tol must be > 0");
  if (!(rho_max > 1.0)) throw Error("NotearsConfig: rho_max must be > 1");
  if (max_dual_iter < 1 || max_inner_iter < 1) throw Error("NotearsConfig: iteration caps must be >= 1");
  if (lbfgs_memory < 1) throw Error("NotearsConfig: lbfgs_memory must be >= 1");
  if (!(tie_break >= 0.0)) throw Error("NotearsConfig: tie_break must be >= 0");
}

namespace {

// The weight matrix is split as W = P - N with P, N >= 0 so the L1 term is linear.
// Decision vector layout: [vec(P); vec(N)], column-major, diagonal entries pinned at 0.
class Subproblem {
 public:
  Subproblem(const Matrix& gram, double n, const NotearsConfig& cfg, double rho, double alpha)
      : gram_(gram), n_(n), cfg_(cfg), rho_(rho), alpha_(alpha), d_(gram.rows()) {
    l1_ = Eigen::VectorXd::Constant(2 * d_ * d_, cfg.lambda1);
    fixed_ = Eigen::VectorXi::Zero(2 * d_ * d_);
    for (Eigen::Index j = 0; j < d_; ++j)
      for (Eigen::Index i = 0; i < d_; ++i) {
        const Eigen::Index k = j * d_ + i;
        if (i == j) fixed_[k] = fixed_[k + d_ * d_] = 1;
        if (i > j) {
          l1_[k] += cfg.tie_break;
          l1_[k + d_ * d_] += cfg.tie_break;
        }
      }
  }

  Eigen::Index size() const { return 2 * d_ * d_; }
  bool fixed(Eigen::Index k) const { return fixed_[k] != 0; }

  Matrix weights(const Eigen::VectorXd& x) const {
    Eigen::Map<const Matrix> p(x.data(), d_, d_);
    Eigen::Map<const Matrix> q(x.data() + d_ * d_, d_, d_);
    return p - q;
  }

  double value_grad(const Eigen::VectorXd& x, Eigen::VectorXd& g) const {
    const Matrix w = weights(x);
    // Loss through the Gram matrix: (1/2n) tr((I-W)^T G (I-W)).
    const Matrix resid = Matrix::Identity(d_, d_) - w;
    const Matrix g_resid = gram_ * resid;
    const double loss = 0.5 / n_ * (resid.cwiseProduct(g_resid)).sum();
    Matrix grad = -1.0 / n_ * g_resid;

    const Matrix e = matrix_exponential(w.cwiseProduct(w));
    const double h = e.trace() - static_cast<double>(d_);
    grad += (rho_ * h + alpha_) * e.transpose().cwiseProduct(2.0 * w);

    g.resize(size());
    Eigen::Map<Matrix>(g.data(), d_, d_) = grad;
    Eigen::Map<Matrix>(g.data() + d_ * d_, d_, d_) = -grad;
    g += l1_;
    for (Eigen::Index k = 0; k < size(); ++k)
      if (fixed(k)) g[k] = 0.0;
    return loss + 0.5 * rho_ * h * h + alpha_ * h + l1_.dot(x);
  }

 private:
  const Matrix& gram_;
  double n_;
  const NotearsConfig& cfg_;
  double rho_;
  double alpha_;
  Eigen::Index d_;
  Eigen::VectorXd l1_;
  Eigen::VectorXi fixed_;
};

// Bound-constrained (x >= 0) limited-memory BFGS: the quasi-Newton direction is computed on
// the free variables, and a projected backtracking Armijo search keeps iterates feasible.
void minimize_nonneg(const Subproblem& prob, Eigen::VectorXd& x, const NotearsConfig& cfg) {
  const Eigen::Index m = prob.size();
  Eigen::VectorXd g(m), g_new(m), dir(m), x_new(m), free(m);
  double f = prob.value_grad(x, g);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;

  auto project = [&](Eigen::VectorXd& v) {
    for (Eigen::Index k = 0; k < m; ++k) v[k] = prob.fixed(k) ? 0.0 : std::max(0.0, v[k]);
  };

  for (int iter = 0; iter < cfg.max_inner_iter; ++iter) {
    double pg_norm = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const bool at_bound = prob.fixed(k) || (x[k] <= 0.0 && g[k] > 0.0);
      free[k] = at_bound ? 0.0 : 1.0;
      if (!at_bound) pg_norm = std::max(pg_norm, std::abs(g[k]));
    }
    if (pg_norm <= cfg.inner_gtol) break;

    // Two-loop recursion restricted to the free coordinates.
    Eigen::VectorXd q = g.cwiseProduct(free);
    std::vector<double> alphas(memory.size());
    for (std::size_t i = memory.size(); i-- > 0;) {
      const auto& [s, y] = memory[i];
      const double sy = s.cwiseProduct(free).dot(y);
      if (sy <= 0.0) continue;
      alphas[i] = s.cwiseProduct(free).dot(q) / sy;
      q -= alphas[i] * y.cwiseProduct(free);
    }
    double gamma = 1.0 / std::max(1.0, pg_norm);
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      const double yy = y.cwiseProduct(free).squaredNorm();
      const double sy = s.cwiseProduct(free).dot(y);
      if (yy > 0.0 && sy > 0.0) gamma = sy / yy;
    }
    q *= gamma;
    for (std::size_t i = 0; i < memory.size(); ++i) {
      const auto& [s, y] = memory[i];
      const double sy = s.cwiseProduct(free).dot(y);
      if (sy <= 0.0) continue;
      const double beta = y.cwiseProduct(free).dot(q) / sy;
      q += (alphas[i] - beta) * s.cwiseProduct(free);
    }
    dir = -q.cwiseProduct(free);
    if (g.dot(dir) >= 0.0) {
      memory.clear();
      dir = -g.cwiseProduct(free) / std::max(1.0, pg_norm);
    }

    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * dir;
      project(x_new);
      const double decrease = g.dot(x_new - x);
      f_new = prob.value_grad(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * decrease && decrease < 0.0) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (memory.empty()) break;
      memory.clear();
      continue;
    }

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    if (s.dot(y) > 1e-12 * s.squaredNorm()) {
      memory.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(memory.size()) > cfg.lbfgs_memory) memory.pop_front();
    }
    const double f_old = f;
    x = x_new;
    g = g_new;
    f = f_new;
    if (std::abs(f_old - f) <= cfg.inner_ftol * std::max({std::abs(f_old), std::abs(f), 1.0})) break;
  }
}

DirectedGraph threshold_to_dag(const Matrix& w, double threshold, std::vector<std::string> labels) {
  const Eigen::Index d = w.rows();
  DirectedGraph g(std::move(labels));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (i != j && std::abs(w(i, j)) > threshold) g.add_edge(i, j);
  // Drop the weakest surviving edge until no cycle remains.
  while (!is_acyclic(g)) {
    double weakest = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> victim{0, 0};
    for (auto [i, j] : g.edges()) {
      const double a = std::abs(w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      if (a < weakest) {
        weakest = a;
        victim = {i, j};
      }
    }
    g.remove_edge(victim.first, victim.second);
  }
  return g;
}

}  // namespace

NotearsResult fit_notears(const Matrix& x, const NotearsConfig& cfg, std::vector<std::string> labels) {
  cfg.validate();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (d == 0) throw Error("fit_notears: data has no columns");
  if (n < 1) throw Error("fit_notears: need at least one sample");
  if (!x.allFinite()) throw Error("fit_notears: data contains non-finite values");
  if (labels.empty())
    for (Eigen::Index i = 0; i < d; ++i) labels.push_back(fmt::format("x{}", i));
  if (static_cast<Eigen::Index>(labels.size()) != d) throw Error("fit_notears: label count differs from column count");

  Matrix data = x;
  if (cfg.center) data.rowwise() -= data.colwise().mean();
  const Matrix gram = data.transpose() * data;

  NotearsResult result;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * d * d);
  double rho = 1.0, alpha = 0.0, h = std::numeric_limits<double>::infinity();

  if (d > 1) {
    for (int outer = 0; outer < cfg.max_dual_iter; ++outer) {
      Eigen::VectorXd z_new = z;
      double h_new = h;
      while (rho < cfg.rho_max) {
        z_new = z;
        Subproblem prob(gram, static_cast<double>(n), cfg, rho, alpha);
        minimize_nonneg(prob, z_new, cfg);
        h_new = acyclicity_h(prob.weights(z_new));
        if (h_new > 0.25 * h) {
          rho *= 10.0;
        } else {
          break;
        }
      }
      z = z_new;
      h = h_new;
      result.outer_h.push_back(h);
      alpha += rho * h;
      if (h <= cfg.h_tol || rho >= cfg.rho_max) break;
    }
  } else {
    h = 0.0;
  }

  Matrix w(d, d);
  w = Eigen::Map<const Matrix>(z.data(), d, d) - Eigen::Map<const Matrix>(z.data() + d * d, d, d);
  result.weights = w;
  result.final_h = h;
  result.converged = h <= cfg.h_tol;
  result.graph = threshold_to_dag(w, cfg.w_threshold, std::move(labels));
  return result;
}

}  // namespace crl
