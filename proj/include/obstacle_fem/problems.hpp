#pragma once

// Benchmark obstacle problems with known solutions, and error evaluation.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "obstacle_fem/errors.hpp"
#include "obstacle_fem/mesh.hpp"
#include "obstacle_fem/quadrature.hpp"
#include "obstacle_fem/spaces.hpp"

namespace obstacle_fem {

struct ProblemSpec {
  std::string name;
  DomainKind domain = DomainKind::Square;
  ScalarField f;
  ScalarField chi;
  VectorField grad_chi;
  ScalarField g;  ///< Dirichlet data
  ScalarField exact_u;
  VectorField exact_grad_u;
};

/// Omega = (-1.5, 1.5)^2, f = -2, chi = 0,
/// u = r^2/2 - ln r - 1/2 for r >= 1 and 0 inside the unit disk.
inline ProblemSpec example1() {
  ProblemSpec p;
  p.name = "ex1";
  p.domain = DomainKind::Square;
  p.f = [](Vec2) { return -2.0; };
  p.chi = [](Vec2) { return 0.0; };
  p.grad_chi = [](Vec2) { return Vec2{}; };
  p.exact_u = [](Vec2 x) {
    const double r2 = dot(x, x);
    if (r2 < 1.0) return 0.0;
    return 0.5 * r2 - 0.5 * std::log(r2) - 0.5;
  };
  p.exact_grad_u = [](Vec2 x) {
    const double r2 = dot(x, x);
    if (r2 < 1.0) return Vec2{};
    return Vec2{x.x - x.x / r2, x.y - x.y / r2};
  };
  p.g = p.exact_u;
  return p;
}

/// Contact radius of the second benchmark, (sqrt 2 - 1) / sqrt 2.
inline const double example2_r0 = (std::sqrt(2.0) - 1.0) / std::sqrt(2.0);

/// Diamond with corners (+-1, 0), (0, +-1); chi = 1 - 2 r^2;
/// f = 0 for r < r0 and 4 r0 / r otherwise; u = chi for r < r0 and
/// 4 r0 (1 - r) otherwise.
inline ProblemSpec example2() {
  const double r0 = example2_r0;
  ProblemSpec p;
  p.name = "ex2";
  p.domain = DomainKind::Diamond;
  p.f = [r0](Vec2 x) {
    const double r = norm(x);
    return r < r0 ? 0.0 : 4.0 * r0 / r;
  };
  p.chi = [](Vec2 x) { return 1.0 - 2.0 * dot(x, x); };
  p.grad_chi = [](Vec2 x) { return Vec2{-4.0 * x.x, -4.0 * x.y}; };
  p.exact_u = [r0](Vec2 x) {
    const double r = norm(x);
    return r < r0 ? 1.0 - 2.0 * r * r : 4.0 * r0 * (1.0 - r);
  };
  p.exact_grad_u = [r0](Vec2 x) {
    const double r = norm(x);
    if (r < r0) return Vec2{-4.0 * x.x, -4.0 * x.y};
    return Vec2{-4.0 * r0 * x.x / r, -4.0 * r0 * x.y / r};
  };
  p.g = p.exact_u;
  return p;
}

inline ProblemSpec problem_by_name(const std::string& name) {
  if (name == "ex1") return example1();
  if (name == "ex2") return example2();
  throw InvalidArgument("unknown problem '" + name + "' (expected ex1 or ex2)");
}

/// ||grad(u - u_h)||_{L2} with the degree-5 rule on every triangle.
inline double energy_error(const P2Function& u_h, const ProblemSpec& spec, const Mesh& mesh, const DofMap& dofs) {
  if (!spec.exact_grad_u) throw UnsupportedOperation("energy_error: problem has no exact gradient");
  if (u_h.size() != dofs.size()) throw ConsistencyError("energy_error: function does not match the dof map");
  static const QuadRule rule = make_quad_rule(5);
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const int ti = static_cast<int>(t);
    const auto g = element_geometry(mesh, ti);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 d = spec.exact_grad_u(g.point(rule.points[q])) - evaluate_gradient(u_h, dofs, ti, g, rule.points[q]);
      sum += rule.weights[q] * g.area * dot(d, d);
    }
  }
  return std::sqrt(sum);
}

/// rate_i = log(e_{i-1} / e_i) / log(h_{i-1} / h_i), one entry per consecutive pair.
inline std::vector<double> convergence_order(const std::vector<double>& errors, const std::vector<double>& h) {
  if (errors.size() != h.size() || errors.size() < 2)
    throw InvalidArgument("convergence_order: need two or more (error, h) pairs of equal length");
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!(errors[i] > 0.0) || !(h[i] > 0.0))
      throw InvalidArgument("convergence_order: errors and mesh sizes must be positive");
  std::vector<double> rates;
  for (std::size_t i = 1; i < errors.size(); ++i)
    rates.push_back(std::log(errors[i - 1] / errors[i]) / std::log(h[i - 1] / h[i]));
  return rates;
}

}  // namespace obstacle_fem
