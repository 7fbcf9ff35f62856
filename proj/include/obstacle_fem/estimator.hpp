#pragma once

// Residual a posteriori indicators for the P2 obstacle problem.
//
// Per triangle T (h_T = diameter):
//   eta1_sq      h_T^2 ||Lap u_h + f - sigma_h||_T^2
//   eta2_sq      sum over interior edges e of T of (h_e / 2) ||[grad u_h]||_e^2
//   eta3_sq      h_T^2 ||sigma_h - mean(sigma_h)||_T^2
//   eta4_sq      h_T^2 ||f - mean(f)||_T^2
//   obst_grad_sq ||grad (chi_h - u_h)^+||_T^2
//   fb_term      -mean(sigma_h) int_T (chi_h - u_h)^-   on free-boundary triangles
//   contact_term -mean(sigma_h) int_T (chi_h - u_h)^+   on contact triangles
// Each interior edge's jump is split evenly between its two triangles.

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <iomanip>
#include <string>
#include <vector>

#include "obstacle_fem/errors.hpp"
#include "obstacle_fem/mesh.hpp"
#include "obstacle_fem/multiplier.hpp"
#include "obstacle_fem/quadrature.hpp"
#include "obstacle_fem/spaces.hpp"
#include "obstacle_fem/vi_solver.hpp"

namespace obstacle_fem {

enum class ElementClass { Contact, NonContact, FreeBoundary };

inline const char* to_string(ElementClass c) {
  switch (c) {
    case ElementClass::Contact: return "contact";
    case ElementClass::NonContact: return "noncontact";
    case ElementClass::FreeBoundary: return "freeboundary";
  }
  return "?";
}

using ElementClassification = std::vector<ElementClass>;

/// Contact: all three midpoints active. Non-contact: none active.
/// Free boundary: otherwise. Boundary midpoints are never active.
inline ElementClassification classify_elements(const ActiveSet& active, const Mesh& mesh, const DofMap& dofs) {
  if (dofs.num_triangles() != mesh.num_triangles())
    throw ConsistencyError("classify_elements: dof map does not belong to this mesh");
  std::vector<char> is_active(dofs.size(), 0);
  for (int d : active) {
    if (d < 0 || static_cast<std::size_t>(d) >= dofs.size())
      throw ConsistencyError("classify_elements: active dof " + std::to_string(d) + " out of range");
    is_active[d] = 1;
  }
  ElementClassification out(mesh.num_triangles());
  for (std::size_t t = 0; t < out.size(); ++t) {
    int count = 0;
    for (int e : dofs.element_edges(static_cast<int>(t))) count += is_active[dofs.edge_dof(e)];
    out[t] = count == 3 ? ElementClass::Contact : count == 0 ? ElementClass::NonContact : ElementClass::FreeBoundary;
  }
  return out;
}

struct ElementIndicators {
  std::vector<double> eta1_sq;
  std::vector<double> eta2_sq;
  std::vector<double> eta3_sq;
  std::vector<double> eta4_sq;
  std::vector<double> obst_grad_sq;
  std::vector<double> fb_term;
  std::vector<double> contact_term;
  std::vector<double> total_sq;
  ElementClassification classes;

  std::size_t size() const { return total_sq.size(); }

  void resize(std::size_t n) {
    for (auto* v : {&eta1_sq, &eta2_sq, &eta3_sq, &eta4_sq, &obst_grad_sq, &fb_term, &contact_term, &total_sq})
      v->assign(n, 0.0);
  }
};

/// Simplified form uses only the interpolated obstacle chi_h (valid when
/// chi - chi_h vanishes on the boundary). Full form uses the pointwise
/// obstacle: ||grad (chi - u_h)^+||^2, -sum_F int mean(sigma) (u_h - chi_h)
/// and -sum_{C u F} int mean(sigma) (chi_h - min(u_h, chi)); its two
/// integrals are stored in fb_term and contact_term.
enum class EstimatorForm { Simplified, Full };

struct PointwiseObstacle {
  ScalarField chi;
  VectorField grad_chi;
};

namespace detail {

/// Laplacian of u_h on triangle t (constant, u_h is quadratic).
inline double p2_laplacian(const P2Function& u, const DofMap& dofs, int t, const ElementGeometry& g) {
  const auto ids = dofs.element_dofs(t);
  double lap = 0.0;
  for (int k = 0; k < 3; ++k) {
    lap += u[ids[k]] * 4.0 * dot(g.grad_lambda[k], g.grad_lambda[k]);
    const auto [i, j] = local_edge_vertices(k);
    lap += u[ids[3 + k]] * 8.0 * dot(g.grad_lambda[i], g.grad_lambda[j]);
  }
  return lap;
}

/// Barycentric coordinates on triangle t of the point (1-s) a + s b, where a
/// and b are vertices of t.
inline std::array<double, 3> edge_point_barycentric(const Triangle& tri, int a, int b, double s) {
  std::array<double, 3> l{};
  for (int k = 0; k < 3; ++k) {
    if (tri[k] == a) l[k] = 1.0 - s;
    if (tri[k] == b) l[k] = s;
  }
  return l;
}

}  // namespace detail

inline ElementIndicators compute_indicators(const P2Function& u_h, const MultiplierPair& multiplier,
                                            const ScalarField& f, const P2Function& chi_h,
                                            const ElementClassification& classes, const Mesh& mesh,
                                            const EdgeTable& edges, const DofMap& dofs, const QuadRule& rule,
                                            EstimatorForm form = EstimatorForm::Simplified,
                                            const PointwiseObstacle* obstacle = nullptr) {
  const std::size_t nt = mesh.num_triangles();
  if (u_h.size() != dofs.size() || chi_h.size() != dofs.size() || classes.size() != nt ||
      multiplier.sigma_h.size() != dofs.num_cr() || multiplier.sigma_bar.size() != nt ||
      dofs.num_triangles() != nt || edges.triangle_edges.size() != nt)
    throw ConsistencyError("compute_indicators: inputs do not share a mesh");
  if (form == EstimatorForm::Full && (obstacle == nullptr || !obstacle->chi || !obstacle->grad_chi))
    throw InvalidArgument("compute_indicators: full form needs the pointwise obstacle and its gradient");

  ElementIndicators ind;
  ind.resize(nt);
  ind.classes = classes;

  for (std::size_t t = 0; t < nt; ++t) {
    const int ti = static_cast<int>(t);
    const auto g = element_geometry(mesh, ti);
    const double h2 = g.diameter * g.diameter;
    const double lap = detail::p2_laplacian(u_h, dofs, ti, g);
    const auto sigma = cr_local_values(multiplier.sigma_h, dofs, ti);
    const double sbar = multiplier.sigma_bar[t];

    double f_mean = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) f_mean += rule.weights[q] * f(g.point(rule.points[q]));

    double res = 0.0, osc = 0.0, grad_pos = 0.0, neg_part = 0.0, pos_part = 0.0;
    double full_fb = 0.0, full_contact = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const Vec2 x = g.point(l);
      const double w = rule.weights[q] * g.area;
      const double fx = f(x);
      const double r = lap + fx - cr_evaluate(sigma, l);
      res += w * r * r;
      osc += w * (fx - f_mean) * (fx - f_mean);

      const double uh = evaluate(u_h, dofs, ti, l);
      const double ch = evaluate(chi_h, dofs, ti, l);
      const Vec2 grad_uh = evaluate_gradient(u_h, dofs, ti, g, l);
      if (form == EstimatorForm::Simplified) {
        const double d = ch - uh;
        if (d > 0.0) {
          const Vec2 gd = evaluate_gradient(chi_h, dofs, ti, g, l) - grad_uh;
          grad_pos += w * dot(gd, gd);
          pos_part += w * d;
        } else {
          neg_part += w * (-d);
        }
      } else {
        const double chi = obstacle->chi(x);
        if (chi - uh > 0.0) {
          const Vec2 gd = obstacle->grad_chi(x) - grad_uh;
          grad_pos += w * dot(gd, gd);
        }
        full_fb += w * (uh - ch);
        full_contact += w * (ch - std::min(uh, chi));
      }
    }

    // sigma_h - mean is linear, so the midpoint rule is exact.
    double dev = 0.0;
    for (int k = 0; k < 3; ++k) dev += (sigma[k] - sbar) * (sigma[k] - sbar);
    dev *= g.area / 3.0;

    ind.eta1_sq[t] = h2 * res;
    ind.eta3_sq[t] = h2 * dev;
    ind.eta4_sq[t] = h2 * osc;
    ind.obst_grad_sq[t] = grad_pos;
    const ElementClass cls = classes[t];
    if (form == EstimatorForm::Simplified) {
      ind.fb_term[t] = cls == ElementClass::FreeBoundary ? -sbar * neg_part : 0.0;
      ind.contact_term[t] = cls == ElementClass::Contact ? -sbar * pos_part : 0.0;
    } else {
      ind.fb_term[t] = cls == ElementClass::FreeBoundary ? -sbar * full_fb : 0.0;
      ind.contact_term[t] = cls != ElementClass::NonContact ? -sbar * full_contact : 0.0;
    }
  }

  // Gradient jumps, two-point Gauss per interior edge.
  for (const Edge& e : edges.edges) {
    if (!e.interior()) continue;
    double jump = 0.0;
    std::array<ElementGeometry, 2> geo{element_geometry(mesh, e.triangles[0]), element_geometry(mesh, e.triangles[1])};
    for (int q = 0; q < 2; ++q) {
      Vec2 grad[2];
      for (int side = 0; side < 2; ++side) {
        const int t = e.triangles[side];
        const auto l = detail::edge_point_barycentric(mesh.triangle(t), e.v0, e.v1, gauss2_points[q]);
        grad[side] = evaluate_gradient(u_h, dofs, t, geo[side], l);
      }
      const Vec2 d = grad[0] - grad[1];
      jump += gauss2_weights[q] * e.length * dot(d, d);
    }
    const double share = 0.5 * e.length * jump;
    ind.eta2_sq[e.triangles[0]] += share;
    ind.eta2_sq[e.triangles[1]] += share;
  }

  for (std::size_t t = 0; t < nt; ++t)
    ind.total_sq[t] = ind.eta1_sq[t] + ind.eta2_sq[t] + ind.eta3_sq[t] + ind.eta4_sq[t] + ind.obst_grad_sq[t] +
                      ind.fb_term[t] + ind.contact_term[t];
  return ind;
}

struct EstimatorSummary {
  double eta_total = 0.0;
  double eta1 = 0.0, eta2 = 0.0, eta3 = 0.0, eta4 = 0.0;
  double obst = 0.0;     ///< sqrt of sum of obst_grad_sq
  double fb = 0.0;       ///< sum of fb_term
  double contact = 0.0;  ///< sum of contact_term
  /// Sum of total_sq over contact, non-contact and free-boundary triangles.
  double contact_sq = 0.0, noncontact_sq = 0.0, free_boundary_sq = 0.0;
};

inline EstimatorSummary total_estimator(const ElementIndicators& ind) {
  EstimatorSummary s;
  double total = 0.0, e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0, ob = 0.0;
  for (std::size_t t = 0; t < ind.size(); ++t) {
    total += ind.total_sq[t];
    e1 += ind.eta1_sq[t];
    e2 += ind.eta2_sq[t];
    e3 += ind.eta3_sq[t];
    e4 += ind.eta4_sq[t];
    ob += ind.obst_grad_sq[t];
    s.fb += ind.fb_term[t];
    s.contact += ind.contact_term[t];
    if (t < ind.classes.size()) {
      switch (ind.classes[t]) {
        case ElementClass::Contact: s.contact_sq += ind.total_sq[t]; break;
        case ElementClass::NonContact: s.noncontact_sq += ind.total_sq[t]; break;
        case ElementClass::FreeBoundary: s.free_boundary_sq += ind.total_sq[t]; break;
      }
    }
  }
  s.eta_total = std::sqrt(std::max(total, 0.0));
  s.eta1 = std::sqrt(e1);
  s.eta2 = std::sqrt(e2);
  s.eta3 = std::sqrt(e3);
  s.eta4 = std::sqrt(e4);
  s.obst = std::sqrt(ob);
  return s;
}

/// CSV: element,class,eta1_sq,eta2_sq,eta3_sq,eta4_sq,obst_grad_sq,fb_term,contact_term,total_sq
inline void write_indicators_csv(std::ostream& os, const ElementIndicators& ind) {
  os << "element,class,eta1_sq,eta2_sq,eta3_sq,eta4_sq,obst_grad_sq,fb_term,contact_term,total_sq\n";
  os << std::setprecision(17);
  for (std::size_t t = 0; t < ind.size(); ++t)
    os << t << ',' << to_string(ind.classes[t]) << ',' << ind.eta1_sq[t] << ',' << ind.eta2_sq[t] << ','
       << ind.eta3_sq[t] << ',' << ind.eta4_sq[t] << ',' << ind.obst_grad_sq[t] << ',' << ind.fb_term[t] << ','
       << ind.contact_term[t] << ',' << ind.total_sq[t] << '\n';
}

}  // namespace obstacle_fem
