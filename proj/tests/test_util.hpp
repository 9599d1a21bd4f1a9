#pragma once

#include <cmath>
#include <functional>

#include "crl/common.hpp"
#include "crl/notears.hpp"

namespace crl::testing {

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = lo + (hi - lo) * uniform01(rng);
  return m;
}

/// Central difference of f along entry (i, j) of x.
inline double central_diff(const std::function<double(const Matrix&)>& f, Matrix x, Eigen::Index i, Eigen::Index j,
                           double step) {
  const double orig = x(i, j);
  x(i, j) = orig + step;
  const double up = f(x);
  x(i, j) = orig - step;
  const double down = f(x);
  return (up - down) / (2.0 * step);
}

/// |a - b| relative to the larger magnitude, with an absolute floor for values near zero.
inline double rel_err(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace crl::testing
