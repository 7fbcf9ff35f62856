#pragma once

// Stiffness and load assembly for the Dirichlet Laplacian in the P2 space.

#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "obstacle_fem/errors.hpp"
#include "obstacle_fem/mesh.hpp"
#include "obstacle_fem/quadrature.hpp"
#include "obstacle_fem/spaces.hpp"

namespace obstacle_fem {

/// Symmetric sparse operator in compressed row storage.
using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using ElementMatrix = Eigen::Matrix<double, 6, 6>;

/// Element stiffness matrix, integrated with the three-point midpoint rule
/// (exact: the integrand is a product of two linear gradients).
inline ElementMatrix element_stiffness(const ElementGeometry& g) {
  static const QuadRule rule = make_quad_rule(2);
  ElementMatrix k = ElementMatrix::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto grads = p2_gradients(g, rule.points[q]);
    const double w = rule.weights[q] * g.area;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) k(i, j) += w * dot(grads[i], grads[j]);
  }
  return k;
}

inline SparseOperator assemble_stiffness(const Mesh& mesh, const DofMap& dofs) {
  if (dofs.num_triangles() != mesh.num_triangles())
    throw ConsistencyError("assemble_stiffness: dof map does not belong to this mesh");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(36 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const int ti = static_cast<int>(t);
    const auto g = element_geometry(mesh, ti);
    if (!(g.area > 0.0)) throw AssemblyError("assemble_stiffness: degenerate element " + std::to_string(t));
    const ElementMatrix k = element_stiffness(g);
    const auto ids = dofs.element_dofs(ti);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) triplets.emplace_back(ids[i], ids[j], k(i, j));
  }
  SparseOperator a(static_cast<Eigen::Index>(dofs.size()), static_cast<Eigen::Index>(dofs.size()));
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

/// Load vector (f, psi_z) for every P2 dof.
inline Vector assemble_load(const ScalarField& f, const Mesh& mesh, const DofMap& dofs, const QuadRule& rule) {
  Vector b = Vector::Zero(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const int ti = static_cast<int>(t);
    const auto g = element_geometry(mesh, ti);
    const auto ids = dofs.element_dofs(ti);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = g.point(rule.points[q]);
      const double fx = f(x);
      if (!std::isfinite(fx)) {
        std::ostringstream os;
        os << "assemble_load: non-finite load at (" << x.x << ", " << x.y << ") in element " << t;
        throw EvaluationError(os.str());
      }
      const auto phi = p2_values(rule.points[q]);
      const double w = rule.weights[q] * g.area * fx;
      for (int i = 0; i < 6; ++i) b[ids[i]] += w * phi[i];
    }
  }
  return b;
}

/// Which dofs are fixed by Dirichlet data and their values, plus the map
/// from global dofs to the free (interior) unknowns.
struct DirichletRecord {
  std::vector<int> free_dofs;
  std::vector<int> fixed_dofs;
  std::vector<double> fixed_values;
  std::vector<int> free_index;  ///< global dof -> free index, -1 if fixed
  std::size_t num_dofs = 0;

  /// Full coefficient vector from free unknowns plus the fixed values.
  Vector expand(const Vector& free) const {
    Vector u = Vector::Zero(static_cast<Eigen::Index>(num_dofs));
    for (std::size_t i = 0; i < free_dofs.size(); ++i) u[free_dofs[i]] = free[static_cast<Eigen::Index>(i)];
    for (std::size_t i = 0; i < fixed_dofs.size(); ++i) u[fixed_dofs[i]] = fixed_values[i];
    return u;
  }
};

/// Boundary nodal values of g.
inline DirichletRecord make_dirichlet_record(const ScalarField& g, const Mesh& mesh, const DofMap& dofs,
                                             const EdgeTable& edges) {
  DirichletRecord rec;
  rec.num_dofs = dofs.size();
  rec.free_index.assign(dofs.size(), -1);
  for (std::size_t d = 0; d < dofs.size(); ++d) {
    const int di = static_cast<int>(d);
    if (!dofs.is_boundary(di)) {
      rec.free_index[d] = static_cast<int>(rec.free_dofs.size());
      rec.free_dofs.push_back(di);
      continue;
    }
    const Vec2 p = dofs.kind(di) == DofKind::Vertex ? mesh.vertex(dofs.entity(di))
                                                    : edges.edges[dofs.entity(di)].midpoint;
    const double v = g(p);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "apply_dirichlet: non-finite boundary value at (" << p.x << ", " << p.y << ")";
      throw EvaluationError(os.str());
    }
    rec.fixed_dofs.push_back(di);
    rec.fixed_values.push_back(v);
  }
  return rec;
}

struct ReducedSystem {
  SparseOperator matrix;  ///< free x free block
  Vector rhs;             ///< load minus the boundary lifting
  DirichletRecord record;
};

/// Restricts `matrix` to the dofs selected by `index` (-1 = dropped).
inline SparseOperator restrict_operator(const SparseOperator& a, const std::vector<int>& index, std::size_t n) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    const int ri = index[r];
    if (ri < 0) continue;
    for (SparseOperator::InnerIterator it(a, r); it; ++it)
      if (const int ci = index[it.col()]; ci >= 0) triplets.emplace_back(ri, ci, it.value());
  }
  SparseOperator out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

/// Eliminates the boundary dofs: free block of the operator and
/// rhs_f = load_f - A_fb g_b.
inline ReducedSystem apply_dirichlet(const SparseOperator& a, const Vector& load, const ScalarField& g,
                                     const Mesh& mesh, const DofMap& dofs, const EdgeTable& edges) {
  ReducedSystem sys;
  sys.record = make_dirichlet_record(g, mesh, dofs, edges);
  const Vector lifting = sys.record.expand(Vector::Zero(static_cast<Eigen::Index>(sys.record.free_dofs.size())));
  const Vector full_rhs = load - a * lifting;
  sys.rhs.resize(static_cast<Eigen::Index>(sys.record.free_dofs.size()));
  for (std::size_t i = 0; i < sys.record.free_dofs.size(); ++i)
    sys.rhs[static_cast<Eigen::Index>(i)] = full_rhs[sys.record.free_dofs[i]];
  sys.matrix = restrict_operator(a, sys.record.free_index, sys.record.free_dofs.size());
  return sys;
}

}  // namespace obstacle_fem
