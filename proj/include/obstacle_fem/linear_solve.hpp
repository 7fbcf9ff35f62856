#pragma once

#include <Eigen/SparseCholesky>
#include <cmath>
#include <string>

#include "obstacle_fem/assembly.hpp"
#include "obstacle_fem/errors.hpp"

namespace obstacle_fem {

/// Normwise backward error ||b - A x||_inf / (||A||_inf ||x||_inf + ||b||_inf).
inline double relative_residual(const SparseOperator& a, const Vector& x, const Vector& b) {
  double anorm = 0.0;
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    double row = 0.0;
    for (SparseOperator::InnerIterator it(a, r); it; ++it) row += std::abs(it.value());
    anorm = std::max(anorm, row);
  }
  const double denom = anorm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  if (denom == 0.0) return 0.0;
  return (b - a * x).lpNorm<Eigen::Infinity>() / denom;
}

/// Sparse Cholesky solve of an SPD system, with a few steps of iterative
/// refinement if the backward error exceeds `tolerance`.
inline Vector linear_solve(const SparseOperator& a, const Vector& b, double tolerance = 1e-12) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw SolverError("linear_solve: dimension mismatch");
  if (a.rows() == 0) return Vector();
  const Eigen::SparseMatrix<double> csc = a;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(csc);
  if (llt.info() != Eigen::Success) throw SolverError("linear_solve: operator is not positive definite");
  Vector x = llt.solve(b);
  for (int step = 0; step < 3 && relative_residual(a, x, b) > tolerance; ++step) x += llt.solve(b - a * x);
  if (!x.allFinite()) throw SolverError("linear_solve: non-finite solution");
  if (const double res = relative_residual(a, x, b); res > tolerance)
    throw SolverError("linear_solve: relative residual " + std::to_string(res) + " above tolerance");
  return x;
}

}  // namespace obstacle_fem
