#pragma once

// Test-only reference computations, independent of the library code paths
// they check.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace oracles {

/// Polynomial in (x, y) with exact monomial bookkeeping.
struct Poly {
  std::map<std::pair<int, int>, double> terms;

  static Poly constant(double c) { return Poly{{{{0, 0}, c}}}; }
  static Poly x() { return Poly{{{{1, 0}, 1.0}}}; }
  static Poly y() { return Poly{{{{0, 1}, 1.0}}}; }

  friend Poly operator+(Poly a, const Poly& b) {
    for (const auto& [k, v] : b.terms) a.terms[k] += v;
    return a;
  }
  friend Poly operator*(double s, Poly a) {
    for (auto& [k, v] : a.terms) v *= s;
    return a;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-1.0) * b; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ka, va] : a.terms)
      for (const auto& [kb, vb] : b.terms) out.terms[{ka.first + kb.first, ka.second + kb.second}] += va * vb;
    return out;
  }
  Poly dx() const {
    Poly out;
    for (const auto& [k, v] : terms)
      if (k.first > 0) out.terms[{k.first - 1, k.second}] += v * k.first;
    return out;
  }
  Poly dy() const {
    Poly out;
    for (const auto& [k, v] : terms)
      if (k.second > 0) out.terms[{k.first, k.second - 1}] += v * k.second;
    return out;
  }
  double operator()(double px, double py) const {
    double s = 0.0;
    for (const auto& [k, v] : terms) s += v * std::pow(px, k.first) * std::pow(py, k.second);
    return s;
  }
};

inline double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

/// Exact integral over the reference triangle (0,0), (1,0), (0,1).
inline double integrate_reference(const Poly& p) {
  double s = 0.0;
  for (const auto& [k, v] : p.terms) s += v * factorial(k.first) * factorial(k.second) / factorial(k.first + k.second + 2);
  return s;
}

/// Exact integral of x^a y^b over the triangle with vertices p0, p1, p2,
/// by pulling back to the reference triangle.
inline double integrate_monomial(const std::array<std::array<double, 2>, 3>& p, int a, int b) {
  const Poly xi = Poly::x(), eta = Poly::y();
  const Poly X = Poly::constant(p[0][0]) + (p[1][0] - p[0][0]) * xi + (p[2][0] - p[0][0]) * eta;
  const Poly Y = Poly::constant(p[0][1]) + (p[1][1] - p[0][1]) * xi + (p[2][1] - p[0][1]) * eta;
  Poly m = Poly::constant(1.0);
  for (int i = 0; i < a; ++i) m = m * X;
  for (int i = 0; i < b; ++i) m = m * Y;
  const double jac = std::abs((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
  return jac * integrate_reference(m);
}

/// P2 shape functions on the reference triangle, local order: vertices
/// 0, 1, 2 then midpoints of the edges opposite vertex 0, 1, 2.
inline std::array<Poly, 6> reference_p2_shapes() {
  const std::array<Poly, 3> l{Poly::constant(1.0) - Poly::x() - Poly::y(), Poly::x(), Poly::y()};
  std::array<Poly, 6> out;
  for (int k = 0; k < 3; ++k) {
    out[k] = l[k] * (2.0 * l[k] - Poly::constant(1.0));
    out[3 + k] = 4.0 * (l[(k + 1) % 3] * l[(k + 2) % 3]);
  }
  return out;
}

/// 6x6 stiffness matrix of the reference triangle by exact integration.
inline Eigen::Matrix<double, 6, 6> reference_p2_stiffness() {
  const auto s = reference_p2_shapes();
  Eigen::Matrix<double, 6, 6> k;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) k(i, j) = integrate_reference(s[i].dx() * s[j].dx() + s[i].dy() * s[j].dy());
  return k;
}

/// Minimizer of 1/2 u'Au - b'u subject to u[c] >= chi[c] for c in
/// `constrained`, with u[f] = fixed_value[f] for f in `fixed`, found by
/// enumerating every active subset and keeping the KKT point.
struct BruteForceResult {
  Eigen::VectorXd u;
  std::vector<int> active;
  int kkt_points = 0;
};

inline std::optional<BruteForceResult> brute_force_obstacle(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                            const std::vector<int>& fixed,
                                                            const std::vector<double>& fixed_values,
                                                            const std::vector<int>& constrained,
                                                            const std::vector<double>& chi, double tol = 1e-10) {
  const int n = static_cast<int>(b.size());
  const int m = static_cast<int>(constrained.size());
  std::optional<BruteForceResult> best;
  int count = 0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    std::vector<char> is_fixed(n, 0);
    for (std::size_t i = 0; i < fixed.size(); ++i) u[fixed[i]] = fixed_values[i], is_fixed[fixed[i]] = 1;
    for (int k = 0; k < m; ++k)
      if (mask & (1u << k)) u[constrained[k]] = chi[k], is_fixed[constrained[k]] = 1;
    std::vector<int> unknown;
    for (int i = 0; i < n; ++i)
      if (!is_fixed[i]) unknown.push_back(i);
    const Eigen::VectorXd rhs_full = b - a * u;
    Eigen::MatrixXd au(unknown.size(), unknown.size());
    Eigen::VectorXd ru(unknown.size());
    for (std::size_t i = 0; i < unknown.size(); ++i) {
      ru[i] = rhs_full[unknown[i]];
      for (std::size_t j = 0; j < unknown.size(); ++j) au(i, j) = a(unknown[i], unknown[j]);
    }
    const Eigen::VectorXd x = au.ldlt().solve(ru);
    for (std::size_t i = 0; i < unknown.size(); ++i) u[unknown[i]] = x[i];
    const Eigen::VectorXd r = b - a * u;
    bool ok = true;
    for (int k = 0; k < m && ok; ++k) {
      if (mask & (1u << k)) ok = -r[constrained[k]] >= -tol;
      else ok = u[constrained[k]] >= chi[k] - tol;
    }
    if (!ok) continue;
    ++count;
    if (!best) {
      best = BruteForceResult{u, {}, 0};
      for (int k = 0; k < m; ++k)
        if (mask & (1u << k)) best->active.push_back(constrained[k]);
    }
  }
  if (best) best->kkt_points = count;
  return best;
}

}  // namespace oracles
