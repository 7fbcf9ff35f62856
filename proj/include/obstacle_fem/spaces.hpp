#pragma once

// Quadratic Lagrange (P2) and Crouzeix-Raviart (CR) spaces on a Mesh.
//
// P2 dofs: vertex v has id v, edge e has id num_vertices + e. Boundary
// vertices and boundary edge midpoints carry dofs too (they hold Dirichlet
// data). CR dofs live on interior edge midpoints only.

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "obstacle_fem/errors.hpp"
#include "obstacle_fem/mesh.hpp"

namespace obstacle_fem {

enum class DofKind { Vertex, Midpoint };

class DofMap {
 public:
  DofMap(const Mesh& mesh, const EdgeTable& edges)
      : num_vertices_(mesh.num_vertices()), num_edges_(edges.size()), triangle_edges_(edges.triangle_edges) {
    if (triangle_edges_.size() != mesh.num_triangles())
      throw ConsistencyError("DofMap: edge table does not belong to this mesh");
    triangles_ = mesh.triangles();
    boundary_.resize(num_vertices_ + num_edges_);
    for (std::size_t v = 0; v < num_vertices_; ++v) boundary_[v] = mesh.is_boundary_vertex(static_cast<int>(v));
    cr_index_.assign(num_edges_, -1);
    for (std::size_t e = 0; e < num_edges_; ++e) {
      boundary_[num_vertices_ + e] = !edges.edges[e].interior();
      if (edges.edges[e].interior()) {
        cr_index_[e] = static_cast<int>(cr_edges_.size());
        cr_edges_.push_back(static_cast<int>(e));
      }
    }
  }

  std::size_t size() const { return num_vertices_ + num_edges_; }
  std::size_t num_vertex_dofs() const { return num_vertices_; }
  std::size_t num_midpoint_dofs() const { return num_edges_; }
  std::size_t num_triangles() const { return triangles_.size(); }

  int vertex_dof(int v) const { return v; }
  int edge_dof(int e) const { return static_cast<int>(num_vertices_) + e; }
  DofKind kind(int dof) const { return static_cast<std::size_t>(dof) < num_vertices_ ? DofKind::Vertex : DofKind::Midpoint; }
  /// Vertex id or edge id behind a dof.
  int entity(int dof) const {
    return kind(dof) == DofKind::Vertex ? dof : dof - static_cast<int>(num_vertices_);
  }
  bool is_boundary(int dof) const { return boundary_[dof] != 0; }

  /// Local order: 3 vertices, then the midpoints of local edges 0, 1, 2.
  std::array<int, 6> element_dofs(int t) const {
    const auto& tri = triangles_[t];
    const auto& ed = triangle_edges_[t];
    return {tri[0], tri[1], tri[2], edge_dof(ed[0]), edge_dof(ed[1]), edge_dof(ed[2])};
  }
  const std::array<int, 3>& element_edges(int t) const { return triangle_edges_[t]; }

  /// Number of CR dofs (interior edge midpoints).
  std::size_t num_cr() const { return cr_edges_.size(); }
  /// CR index of edge e, or -1 for a boundary edge.
  int cr_index(int e) const { return cr_index_[e]; }
  int cr_edge(int k) const { return cr_edges_[k]; }
  int cr_to_dof(int k) const { return edge_dof(cr_edges_[k]); }
  /// CR index of a P2 midpoint dof, or -1.
  int dof_to_cr(int dof) const { return kind(dof) == DofKind::Midpoint ? cr_index_[entity(dof)] : -1; }

 private:
  std::size_t num_vertices_;
  std::size_t num_edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<Triangle> triangles_;
  std::vector<std::uint8_t> boundary_;
  std::vector<int> cr_index_;
  std::vector<int> cr_edges_;
};

/// Coefficients over all P2 dofs of a DofMap.
struct P2Function {
  std::vector<double> coefficients;

  std::size_t size() const { return coefficients.size(); }
  double operator[](std::size_t i) const { return coefficients[i]; }
  double& operator[](std::size_t i) { return coefficients[i]; }
};

/// Values at interior edge midpoints, indexed by CR index.
struct CRFunction {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

using ScalarField = std::function<double(Vec2)>;
using VectorField = std::function<Vec2(Vec2)>;

/// Barycentric coordinates of the P2 nodes in local dof order.
inline constexpr std::array<std::array<double, 3>, 6> p2_nodes{{
    {1.0, 0.0, 0.0},
    {0.0, 1.0, 0.0},
    {0.0, 0.0, 1.0},
    {0.0, 0.5, 0.5},
    {0.5, 0.0, 0.5},
    {0.5, 0.5, 0.0},
}};

struct P2BasisValues {
  std::array<double, 6> values{};
  /// Gradients with respect to the reference coordinates (xi, eta), where
  /// lambda1 = xi, lambda2 = eta, lambda0 = 1 - xi - eta.
  std::array<Vec2, 6> gradients{};
};

inline P2BasisValues p2_reference_basis(const std::array<double, 3>& l) {
  // d lambda_k / d(xi, eta)
  constexpr std::array<Vec2, 3> dl{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
  P2BasisValues out;
  for (int k = 0; k < 3; ++k) {
    out.values[k] = l[k] * (2.0 * l[k] - 1.0);
    out.gradients[k] = (4.0 * l[k] - 1.0) * dl[k];
    const auto [i, j] = local_edge_vertices(k);
    out.values[3 + k] = 4.0 * l[i] * l[j];
    out.gradients[3 + k] = 4.0 * (l[j] * dl[i] + l[i] * dl[j]);
  }
  return out;
}

/// Physical gradients of the six local P2 shape functions at barycentric point l.
inline std::array<Vec2, 6> p2_gradients(const ElementGeometry& g, const std::array<double, 3>& l) {
  std::array<Vec2, 6> out;
  for (int k = 0; k < 3; ++k) {
    out[k] = (4.0 * l[k] - 1.0) * g.grad_lambda[k];
    const auto [i, j] = local_edge_vertices(k);
    out[3 + k] = 4.0 * (l[j] * g.grad_lambda[i] + l[i] * g.grad_lambda[j]);
  }
  return out;
}

inline std::array<double, 6> p2_values(const std::array<double, 3>& l) { return p2_reference_basis(l).values; }

/// Nodal interpolation at all P2 nodes, boundary nodes included.
inline P2Function interpolate_p2(const ScalarField& field, const Mesh& mesh, const DofMap& dofs,
                                 const EdgeTable& edges) {
  P2Function out{std::vector<double>(dofs.size())};
  const auto eval = [&](int dof, Vec2 p) {
    const double v = field(p);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "interpolate_p2: non-finite value at node " << dof << " (" << p.x << ", " << p.y << ")";
      throw EvaluationError(os.str());
    }
    out.coefficients[dof] = v;
  };
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    eval(dofs.vertex_dof(static_cast<int>(v)), mesh.vertex(static_cast<int>(v)));
  for (std::size_t e = 0; e < edges.size(); ++e) eval(dofs.edge_dof(static_cast<int>(e)), edges.edges[e].midpoint);
  return out;
}

/// Value of a P2 function at barycentric point l of triangle t.
inline double evaluate(const P2Function& u, const DofMap& dofs, int t, const std::array<double, 3>& l) {
  const auto ids = dofs.element_dofs(t);
  const auto phi = p2_values(l);
  double s = 0.0;
  for (int i = 0; i < 6; ++i) s += u[ids[i]] * phi[i];
  return s;
}

inline Vec2 evaluate_gradient(const P2Function& u, const DofMap& dofs, int t, const ElementGeometry& g,
                              const std::array<double, 3>& l) {
  const auto ids = dofs.element_dofs(t);
  const auto grads = p2_gradients(g, l);
  Vec2 s;
  for (int i = 0; i < 6; ++i) s = s + u[ids[i]] * grads[i];
  return s;
}

/// CR function with the midpoint values of v (vertex values are dropped).
inline CRFunction pi_h_inverse(const P2Function& v, const DofMap& dofs) {
  if (v.size() != dofs.size()) throw ConsistencyError("pi_h_inverse: function does not match the dof map");
  CRFunction w{std::vector<double>(dofs.num_cr())};
  for (std::size_t k = 0; k < dofs.num_cr(); ++k) w[k] = v[dofs.cr_to_dof(static_cast<int>(k))];
  return w;
}

/// Element of the midpoint-bubble part of the P2 space: vertex and boundary
/// midpoint coefficients zero, interior midpoint coefficients from w.
inline P2Function pi_h(const CRFunction& w, const DofMap& dofs) {
  if (w.size() != dofs.num_cr()) throw ConsistencyError("pi_h: function does not match the dof map");
  P2Function v{std::vector<double>(dofs.size(), 0.0)};
  for (std::size_t k = 0; k < dofs.num_cr(); ++k) v[dofs.cr_to_dof(static_cast<int>(k))] = w[k];
  return v;
}

/// |T|/3 times the sum of g over the three edge midpoints; exact for
/// polynomials of degree <= 2.
template <class G>
double midpoint_quadrature(const ElementGeometry& geom, G&& g) {
  return geom.area / 3.0 * (g(geom.edge_midpoint(0)) + g(geom.edge_midpoint(1)) + g(geom.edge_midpoint(2)));
}

/// The three midpoint values of a CR function on triangle t; boundary
/// midpoints read as 0.
inline std::array<double, 3> cr_local_values(const CRFunction& w, const DofMap& dofs, int t) {
  std::array<double, 3> out{};
  const auto& ed = dofs.element_edges(t);
  for (int k = 0; k < 3; ++k) {
    const int c = dofs.cr_index(ed[k]);
    out[k] = c >= 0 ? w[c] : 0.0;
  }
  return out;
}

/// Value at barycentric point l of the elementwise linear function with the
/// given local midpoint values (local CR basis 1 - 2 lambda_k).
inline double cr_evaluate(const std::array<double, 3>& mid_values, const std::array<double, 3>& l) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += mid_values[k] * (1.0 - 2.0 * l[k]);
  return s;
}

/// Lumped weights omega_z = sum over triangles containing z of |T|/3, per CR index.
inline std::vector<double> lumped_weights(const Mesh& mesh, const DofMap& dofs) {
  std::vector<double> omega(dofs.num_cr(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a3 = mesh.signed_area(static_cast<int>(t)) / 3.0;
    for (int e : dofs.element_edges(static_cast<int>(t)))
      if (const int c = dofs.cr_index(e); c >= 0) omega[c] += a3;
  }
  return omega;
}

/// Mass-lumped inner product of two CR functions.
inline double lumped_inner_cr(const CRFunction& w, const CRFunction& v, const Mesh& mesh, const DofMap& dofs) {
  if (w.size() != dofs.num_cr() || v.size() != dofs.num_cr())
    throw ConsistencyError("lumped_inner_cr: functions do not match the dof map");
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto wl = cr_local_values(w, dofs, static_cast<int>(t));
    const auto vl = cr_local_values(v, dofs, static_cast<int>(t));
    s += mesh.signed_area(static_cast<int>(t)) / 3.0 * (wl[0] * vl[0] + wl[1] * vl[1] + wl[2] * vl[2]);
  }
  return s;
}

}  // namespace obstacle_fem
