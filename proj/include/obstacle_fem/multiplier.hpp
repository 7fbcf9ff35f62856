#pragma once

// Discrete Lagrange multiplier sigma_h in the Crouzeix-Raviart space and its
// elementwise mean.
//
// Testing <sigma_h, v>_h = (f, Pi v) - a(u_h, Pi v) with the CR basis
// function of an interior midpoint z gives omega_z sigma_h(z) = r_z, the
// solver residual at z, so sigma_h is read off the residuals directly.

#include <string>
#include <vector>

#include "obstacle_fem/errors.hpp"
#include "obstacle_fem/mesh.hpp"
#include "obstacle_fem/spaces.hpp"
#include "obstacle_fem/vi_solver.hpp"

namespace obstacle_fem {

struct MultiplierPair {
  CRFunction sigma_h;
  std::vector<double> sigma_bar;  ///< per triangle
  std::vector<double> omega;      ///< lumped weight per CR index
};

/// Elementwise mean of a CR function: the average of its three midpoint
/// values (boundary midpoints count as 0).
inline std::vector<double> sigma_bar(const CRFunction& sigma_h, const Mesh& mesh, const DofMap& dofs) {
  if (sigma_h.size() != dofs.num_cr() || dofs.num_triangles() != mesh.num_triangles())
    throw ConsistencyError("sigma_bar: inputs do not share a mesh");
  std::vector<double> bar(mesh.num_triangles());
  for (std::size_t t = 0; t < bar.size(); ++t) {
    const auto v = cr_local_values(sigma_h, dofs, static_cast<int>(t));
    bar[t] = (v[0] + v[1] + v[2]) / 3.0;
  }
  return bar;
}

inline MultiplierPair compute_sigma_h(const SolveResult& result, const Mesh& mesh, const DofMap& dofs) {
  if (result.residuals.size() != dofs.size())
    throw ConsistencyError("compute_sigma_h: solve result does not match the dof map");
  MultiplierPair out;
  out.omega = lumped_weights(mesh, dofs);
  out.sigma_h.values.resize(dofs.num_cr());
  for (std::size_t k = 0; k < dofs.num_cr(); ++k) {
    if (!(out.omega[k] > 0.0))
      throw ConsistencyError("compute_sigma_h: zero lumped weight at midpoint " + std::to_string(k));
    out.sigma_h[k] = result.residuals[dofs.cr_to_dof(static_cast<int>(k))] / out.omega[k];
  }
  out.sigma_bar = sigma_bar(out.sigma_h, mesh, dofs);
  return out;
}

}  // namespace obstacle_fem
