#include <gtest/gtest.h>

#include <random>

#include "obstacle_fem/obstacle_fem.hpp"

using namespace obstacle_fem;

namespace {

Vec2 random_point(std::mt19937& rng, const ProblemSpec& p) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (;;) {
    const Vec2 x{u(rng), u(rng)};
    if (p.domain == DomainKind::Square || std::abs(x.x) + std::abs(x.y) < 1.0) return x;
  }
}

double laplacian_fd(const ScalarField& u, Vec2 x, double h) {
  return (u(x + Vec2{h, 0}) + u(x - Vec2{h, 0}) + u(x + Vec2{0, h}) + u(x - Vec2{0, h}) - 4.0 * u(x)) / (h * h);
}

double kink_radius(const ProblemSpec& p) { return p.name == "ex1" ? 1.0 : example2_r0; }

}  // namespace

TEST(Example1, ClosedFormValues) {
  const ProblemSpec p = example1();
  EXPECT_NEAR(p.exact_u({1.5, 0.0}), 1.125 - std::log(1.5) - 0.5, 1e-15);
  EXPECT_NEAR(p.exact_u({1.5, 0.0}), 0.2195348918918356, 1e-13);
  EXPECT_NEAR(p.exact_u({1.0, 0.0}), 0.0, 1e-15);
  EXPECT_NEAR(norm(p.exact_grad_u({0.6, 0.8})), 0.0, 1e-15);
  EXPECT_EQ(p.f({0.3, 0.2}), -2.0);
  EXPECT_EQ(p.chi({0.3, 0.2}), 0.0);
}

TEST(Example2, ClosedFormValues) {
  const ProblemSpec p = example2();
  const double r0 = example2_r0;
  EXPECT_NEAR(r0, 0.29289321881, 1e-11);
  EXPECT_NEAR(1.0 - 2.0 * r0 * r0, 4.0 * r0 * (1.0 - r0), 1e-15);
  EXPECT_NEAR(4.0 * r0 * (1.0 - r0), 2.0 * std::sqrt(2.0) - 2.0, 1e-14);
  EXPECT_NEAR(p.exact_u({1.0, 0.0}), 0.0, 1e-15);
  EXPECT_EQ(p.chi({0.0, 0.0}), 1.0);
  EXPECT_EQ(p.exact_u({0.0, 0.0}), 1.0);
}

TEST(Problems, LookupByName) {
  EXPECT_EQ(problem_by_name("ex1").domain, DomainKind::Square);
  EXPECT_EQ(problem_by_name("ex2").domain, DomainKind::Diamond);
  EXPECT_THROW(problem_by_name("ex3"), InvalidArgument);
}

TEST(Problems, GradientsMatchFiniteDifferences) {
  for (const ProblemSpec& p : {example1(), example2()}) {
    std::mt19937 rng(17);
    int checked = 0;
    while (checked < 1000) {
      const Vec2 x = random_point(rng, p);
      if (std::abs(norm(x) - kink_radius(p)) < 1e-3 || norm(x) < 1e-3) continue;
      ++checked;
      const double h = 1e-5;
      const Vec2 fd{(p.exact_u(x + Vec2{h, 0}) - p.exact_u(x - Vec2{h, 0})) / (2 * h),
                    (p.exact_u(x + Vec2{0, h}) - p.exact_u(x - Vec2{0, h})) / (2 * h)};
      const Vec2 g = p.exact_grad_u(x);
      EXPECT_NEAR(g.x, fd.x, 1e-6) << p.name;
      EXPECT_NEAR(g.y, fd.y, 1e-6) << p.name;
      const Vec2 gc = p.grad_chi(x);
      const Vec2 fdc{(p.chi(x + Vec2{h, 0}) - p.chi(x - Vec2{h, 0})) / (2 * h),
                     (p.chi(x + Vec2{0, h}) - p.chi(x - Vec2{0, h})) / (2 * h)};
      EXPECT_NEAR(gc.x, fdc.x, 1e-6);
      EXPECT_NEAR(gc.y, fdc.y, 1e-6);
    }
  }
}

TEST(Problems, ExactDataComplementarity) {
  for (const ProblemSpec& p : {example1(), example2()}) {
    std::mt19937 rng(23);
    int checked = 0;
    while (checked < 1000) {
      const Vec2 x = random_point(rng, p);
      if (std::abs(norm(x) - kink_radius(p)) < 1e-2 || norm(x) < 1e-2) continue;
      ++checked;
      const double sigma = laplacian_fd(p.exact_u, x, 1e-4) + p.f(x);
      EXPECT_LE(sigma, 1e-5) << p.name;
      EXPECT_NEAR(sigma * (p.exact_u(x) - p.chi(x)), 0.0, 1e-5) << p.name;
    }
  }
}

TEST(Problems, DataFeasibility) {
  for (const ProblemSpec& p : {example1(), example2()}) {
    std::mt19937 rng(29);
    for (int i = 0; i < 10000; ++i) {
      const Vec2 x = random_point(rng, p);
      EXPECT_GE(p.exact_u(x), p.chi(x) - 1e-15) << p.name;
    }
    const Mesh mesh = build_crisscross_mesh(p.domain, 16);
    const EdgeTable edges = edge_topology(mesh);
    const DofMap dofs(mesh, edges);
    EXPECT_NO_THROW(check_boundary_feasibility(p, mesh, edges, dofs));
  }
  ProblemSpec bad = example1();
  bad.chi = [](Vec2) { return 5.0; };
  const Mesh mesh = build_crisscross_mesh(bad.domain, 2);
  const EdgeTable edges = edge_topology(mesh);
  EXPECT_THROW(check_boundary_feasibility(bad, mesh, edges, DofMap(mesh, edges)), InvalidArgument);
}

TEST(EnergyError, Examples) {
  // Interpolant of a global quadratic.
  ProblemSpec q = example1();
  q.exact_u = [](Vec2 x) { return x.x * x.x - x.x * x.y + 2.0 * x.y; };
  q.exact_grad_u = [](Vec2 x) { return Vec2{2.0 * x.x - x.y, -x.x + 2.0}; };
  const Mesh mesh = bisect(build_crisscross_mesh(DomainKind::Square, 3), std::vector<int>{3, 4});
  const EdgeTable edges = edge_topology(mesh);
  const DofMap dofs(mesh, edges);
  EXPECT_LE(energy_error(interpolate_p2(q.exact_u, mesh, dofs, edges), q, mesh, dofs), 1e-10);

  // u = x on the unit square, u_h = 0.
  const Mesh unit = make_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}}, Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  const EdgeTable ue = edge_topology(unit);
  const DofMap ud(unit, ue);
  ProblemSpec lin;
  lin.exact_grad_u = [](Vec2) { return Vec2{1.0, 0.0}; };
  EXPECT_NEAR(energy_error(P2Function{std::vector<double>(ud.size(), 0.0)}, lin, unit, ud), 1.0, 1e-14);

  lin.exact_grad_u = nullptr;
  EXPECT_THROW(energy_error(P2Function{std::vector<double>(ud.size(), 0.0)}, lin, unit, ud), UnsupportedOperation);
}

TEST(EnergyError, ExampleOneFineUniformRow) {
  AdaptiveConfig cfg;
  cfg.uniform = true;
  const ProblemSpec p = example1();
  const LevelSolution sol = solve_and_estimate(p, build_crisscross_mesh(p.domain, 16), cfg);
  EXPECT_NEAR(sol.record.error, 0.017334877653178, 0.3 * 0.017334877653178);
}

TEST(ConvergenceOrder, Examples) {
  EXPECT_NEAR(convergence_order({0.4, 0.1}, {1.0, 0.5})[0], 2.0, 1e-14);
  EXPECT_NEAR(convergence_order({0.359703822003801, 0.127058164618133}, {0.75, 0.375})[0], 1.501, 5e-4);
  EXPECT_EQ(convergence_order({0.2, 0.2, 0.2}, {1.0, 0.5, 0.25}), (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(convergence_order({0.1}, {1.0}), InvalidArgument);
  EXPECT_THROW(convergence_order({0.1, 0.0}, {1.0, 0.5}), InvalidArgument);
  EXPECT_THROW(convergence_order({0.1, 0.2}, {1.0, -0.5}), InvalidArgument);
}
