#pragma once

// Discrete obstacle problem: minimize 1/2 u'Ku - b'u over the free dofs,
// subject to u >= chi at a set of constrained dofs, by the primal-dual
// active set method (semismooth Newton for the bound-constrained QP).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "obstacle_fem/assembly.hpp"
#include "obstacle_fem/errors.hpp"
#include "obstacle_fem/linear_solve.hpp"
#include "obstacle_fem/spaces.hpp"

namespace obstacle_fem {

struct SolverOptions {
  int max_iterations = 50;
  double linear_tolerance = 1e-12;
  /// Weight c of the active set prediction; 0 selects
  /// 1e6 * max diag(K) / max lumped weight.
  double complementarity_weight = 0.0;
};

/// Lower bounds u[dofs[k]] >= chi[k]. `weights` (optional) are the lumped
/// masses of the constrained nodes and only enter the default weight c.
struct ObstacleConstraints {
  std::vector<int> dofs;
  std::vector<double> chi;
  std::vector<double> weights;

  std::size_t size() const { return dofs.size(); }
};

/// Sorted global dof ids held at the obstacle.
using ActiveSet = std::vector<int>;

struct SolveResult {
  P2Function u;
  ActiveSet active;
  /// r = (f, psi_z) - a(u_h, psi_z) for every dof; 0 on Dirichlet dofs.
  std::vector<double> residuals;
  int iterations = 0;
  /// Quadratic energy of each iterate.
  std::vector<double> energies;
  /// Number of iterates whose energy rose above the previous one by more than 1e-12 relative.
  int energy_increases = 0;
  /// max(1, ||load||_inf), the reference for tolerances.
  double scale = 1.0;
};

/// Next active set: constraint indices k with lambda_k + c (chi_k - u_k) > 0,
/// where lambda >= 0 is the multiplier of u >= chi.
inline std::vector<int> pdas_update(std::span<const double> u, std::span<const double> lambda,
                                    std::span<const double> chi, double c) {
  if (!(c > 0.0)) throw InvalidArgument("pdas_update: c must be positive");
  if (u.size() != lambda.size() || u.size() != chi.size()) throw InvalidArgument("pdas_update: size mismatch");
  std::vector<int> active;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (lambda[k] + c * (chi[k] - u[k]) > 0.0) active.push_back(static_cast<int>(k));
  return active;
}

/// Solves the obstacle QP. `initial` is a warm-start active set of global
/// dofs; ids that are not constrained are ignored.
inline SolveResult solve_obstacle(const SparseOperator& stiffness, const Vector& load, const DirichletRecord& bc,
                                  const ObstacleConstraints& obstacle, const SolverOptions& options = {},
                                  const ActiveSet& initial = {}) {
  const std::size_t n = bc.num_dofs;
  if (static_cast<std::size_t>(stiffness.rows()) != n || static_cast<std::size_t>(load.size()) != n)
    throw ConsistencyError("solve_obstacle: operator, load and boundary record disagree in size");
  if (obstacle.chi.size() != obstacle.dofs.size())
    throw InvalidArgument("solve_obstacle: obstacle values and dofs differ in length");
  if (options.max_iterations < 1) throw InvalidArgument("solve_obstacle: max_iterations must be >= 1");

  const std::size_t m = obstacle.size();
  std::vector<int> constraint_of(n, -1);
  for (std::size_t k = 0; k < m; ++k) {
    const int d = obstacle.dofs[k];
    if (d < 0 || static_cast<std::size_t>(d) >= n || bc.free_index[d] < 0)
      throw InvalidArgument("solve_obstacle: constrained dof " + std::to_string(d) + " is not a free dof");
    if (!std::isfinite(obstacle.chi[k])) throw InvalidArgument("solve_obstacle: non-finite obstacle value");
    constraint_of[d] = static_cast<int>(k);
  }

  double c = options.complementarity_weight;
  if (c <= 0.0) {
    double max_diag = 0.0;
    for (Eigen::Index i = 0; i < stiffness.rows(); ++i) max_diag = std::max(max_diag, stiffness.coeff(i, i));
    double max_weight = 0.0;
    for (double w : obstacle.weights) max_weight = std::max(max_weight, w);
    c = 1e6 * max_diag / (max_weight > 0.0 ? max_weight : 1.0);
  }

  SolveResult result;
  result.scale = std::max(1.0, load.lpNorm<Eigen::Infinity>());
  const double kkt_tol = 1e-12 * result.scale;

  std::vector<char> active(m, 0);
  for (int d : initial)
    if (d >= 0 && static_cast<std::size_t>(d) < n && constraint_of[d] >= 0) active[constraint_of[d]] = 1;

  std::vector<double> u_c(m), lambda(m);
  Vector u_full = bc.expand(Vector::Zero(static_cast<Eigen::Index>(bc.free_dofs.size())));
  for (int it = 1; it <= options.max_iterations; ++it) {
    // Unknowns: free dofs that are not held at the obstacle.
    Vector fixed = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < bc.fixed_dofs.size(); ++i) fixed[bc.fixed_dofs[i]] = bc.fixed_values[i];
    std::vector<int> index(n, -1);
    std::vector<int> unknowns;
    unknowns.reserve(bc.free_dofs.size());
    for (int d : bc.free_dofs) {
      const int k = constraint_of[d];
      if (k >= 0 && active[k]) {
        fixed[d] = obstacle.chi[k];
      } else {
        index[d] = static_cast<int>(unknowns.size());
        unknowns.push_back(d);
      }
    }
    const Vector rhs_full = load - stiffness * fixed;
    Vector rhs(static_cast<Eigen::Index>(unknowns.size()));
    for (std::size_t i = 0; i < unknowns.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = rhs_full[unknowns[i]];
    const Vector x = linear_solve(restrict_operator(stiffness, index, unknowns.size()), rhs, options.linear_tolerance);

    u_full = fixed;
    for (std::size_t i = 0; i < unknowns.size(); ++i) u_full[unknowns[i]] = x[static_cast<Eigen::Index>(i)];
    const Vector residual = load - stiffness * u_full;
    const double energy = 0.5 * u_full.dot(stiffness * u_full) - load.dot(u_full);
    if (!result.energies.empty() &&
        energy > result.energies.back() + 1e-12 * std::max(1.0, std::abs(result.energies.back())))
      ++result.energy_increases;
    result.energies.push_back(energy);

    for (std::size_t k = 0; k < m; ++k) {
      u_c[k] = u_full[obstacle.dofs[k]];
      lambda[k] = active[k] ? -residual[obstacle.dofs[k]] : 0.0;
    }
    const std::vector<int> next = pdas_update(u_c, lambda, obstacle.chi, c);
    std::vector<char> next_active(m, 0);
    for (int k : next) next_active[k] = 1;

    // Converged when the prediction repeats, or when the iterate already
    // satisfies the KKT conditions up to rounding (guards against flipping
    // on degenerate nodes).
    bool kkt = true;
    for (std::size_t k = 0; k < m && kkt; ++k)
      kkt = active[k] ? lambda[k] >= -kkt_tol : u_c[k] >= obstacle.chi[k] - kkt_tol;

    if (next_active == active || kkt) {
      result.iterations = it;
      result.u = P2Function{std::vector<double>(u_full.data(), u_full.data() + n)};
      result.residuals.assign(n, 0.0);
      for (int d : bc.free_dofs) result.residuals[d] = residual[d];
      for (std::size_t k = 0; k < m; ++k)
        if (active[k] && lambda[k] > 0.0) result.active.push_back(obstacle.dofs[k]);
      std::sort(result.active.begin(), result.active.end());
      return result;
    }
    active = std::move(next_active);
  }
  throw NonConvergenceError("solve_obstacle: active set iteration did not converge in " +
                                std::to_string(options.max_iterations) + " iterations",
                            std::vector<double>(u_full.data(), u_full.data() + n));
}

}  // namespace obstacle_fem
