#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "obstacle_fem/errors.hpp"
#include "obstacle_fem/mesh.hpp"

namespace obstacle_fem {

/// Quadrature rule on a triangle in barycentric coordinates. Weights sum to 1,
/// so an integral is `area * sum_q w_q f(x_q)`.
struct QuadRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }

  template <class F>
  double integrate(const ElementGeometry& geom, F&& f) const {
    double sum = 0.0;
    for (std::size_t q = 0; q < points.size(); ++q) sum += weights[q] * f(geom.point(points[q]));
    return geom.area * sum;
  }
};

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Exact integral of x^a y^b over the reference triangle (0,0),(1,0),(0,1),
/// normalized by its area 1/2.
inline double reference_monomial_mean(int a, int b) {
  return 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2);
}

inline void add_orbit3(QuadRule& rule, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  rule.points.push_back({a, a, b});
  rule.points.push_back({a, b, a});
  rule.points.push_back({b, a, a});
  rule.weights.insert(rule.weights.end(), 3, w);
}

inline void verify_exactness(const QuadRule& rule) {
  for (int a = 0; a <= rule.degree; ++a)
    for (int b = 0; a + b <= rule.degree; ++b) {
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
        sum += rule.weights[q] * std::pow(rule.points[q][1], a) * std::pow(rule.points[q][2], b);
      const double exact = reference_monomial_mean(a, b);
      if (std::abs(sum - exact) > 1e-13 * std::max(1.0, exact))
        throw std::logic_error("quadrature rule of degree " + std::to_string(rule.degree) +
                               " fails on monomial x^" + std::to_string(a) + " y^" + std::to_string(b));
    }
}

}  // namespace detail

/// Degree 2: edge midpoints. Degree 4: 6-point Dunavant rule. Degree 5:
/// 7-point Radon rule. Each rule is checked against exact monomial integrals.
inline QuadRule make_quad_rule(int degree) {
  QuadRule rule;
  rule.degree = degree;
  switch (degree) {
    case 2:
      rule.points = {{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}};
      rule.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
      break;
    case 4:
      detail::add_orbit3(rule, 0.445948490915965, 0.223381589678011);
      detail::add_orbit3(rule, 0.091576213509771, 0.109951743655322);
      break;
    case 5: {
      const double s15 = std::sqrt(15.0);
      rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      rule.weights.push_back(9.0 / 40.0);
      detail::add_orbit3(rule, (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
      detail::add_orbit3(rule, (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
      break;
    }
    default:
      throw InvalidArgument("make_quad_rule: unsupported degree " + std::to_string(degree) + " (use 2, 4 or 5)");
  }
  detail::verify_exactness(rule);
  return rule;
}

/// Two-point Gauss rule on [0,1]: parameters and weights (weights sum to 1).
inline constexpr std::array<double, 2> gauss2_points{0.21132486540518711775, 0.78867513459481288225};
inline constexpr std::array<double, 2> gauss2_weights{0.5, 0.5};

}  // namespace obstacle_fem
