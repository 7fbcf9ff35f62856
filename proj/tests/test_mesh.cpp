#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "checks.hpp"
#include "obstacle_fem/mesh.hpp"

using namespace obstacle_fem;

namespace {

Mesh single_triangle() {
  return make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, Polygon({{0, 0}, {1, 0}, {0, 1}}));
}

}  // namespace

TEST(Mesh, CrissCrossCounts) {
  const Mesh m1 = build_crisscross_mesh(DomainKind::Square, 1);
  EXPECT_EQ(m1.num_vertices(), 5u);
  EXPECT_EQ(m1.num_triangles(), 4u);
  EXPECT_NEAR(m1.total_area(), 9.0, 1e-12);

  const Mesh m2 = build_crisscross_mesh(DomainKind::Square, 2);
  EXPECT_EQ(m2.num_vertices(), 13u);
  EXPECT_EQ(m2.num_triangles(), 16u);

  for (int n : {3, 5, 8}) {
    const Mesh m = build_crisscross_mesh(DomainKind::Diamond, n);
    EXPECT_EQ(m.num_vertices(), std::size_t((n + 1) * (n + 1) + n * n));
    EXPECT_EQ(m.num_triangles(), std::size_t(4 * n * n));
  }
}

TEST(Mesh, DiamondAreaIsShoelaceArea) {
  const Mesh m = build_crisscross_mesh(DomainKind::Diamond, 2);
  EXPECT_EQ(m.num_triangles(), 16u);
  // Shoelace on (-1,0), (0,-1), (1,0), (0,1).
  const double shoelace = 0.5 * ((-1 * -1 - 0 * 0) + (0 * 0 - 1 * -1) + (1 * 1 - 0 * 0) + (0 * 0 - -1 * 1));
  EXPECT_NEAR(shoelace, 2.0, 0.0);
  EXPECT_NEAR(m.total_area(), shoelace, 1e-12 * shoelace);
}

TEST(Mesh, RejectsBadInput) {
  EXPECT_THROW(build_crisscross_mesh(DomainKind::Square, 0), InvalidArgument);
  EXPECT_THROW(make_mesh({{0, 0}, {0, 1}, {1, 0}}, {{0, 1, 2}}, Polygon({{0, 0}, {1, 0}, {0, 1}})), TopologyError);
}

TEST(Mesh, BoundaryFlags) {
  const Mesh m = build_crisscross_mesh(DomainKind::Square, 2);
  int boundary = 0;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) boundary += m.is_boundary_vertex(int(v));
  EXPECT_EQ(boundary, 8);
}

TEST(EdgeTopology, Counts) {
  const auto single = edge_topology(single_triangle());
  EXPECT_EQ(single.size(), 3u);
  EXPECT_EQ(single.num_interior, 0u);

  const auto e1 = edge_topology(build_crisscross_mesh(DomainKind::Square, 1));
  EXPECT_EQ(e1.size(), 8u);
  EXPECT_EQ(e1.num_interior, 4u);

  // Euler: V - E + F = 2 with F = 16 + 1, V = 13, so E = 28; 8 of them on the boundary.
  const Mesh m2 = build_crisscross_mesh(DomainKind::Square, 2);
  const auto e2 = edge_topology(m2);
  EXPECT_EQ(int(m2.num_vertices()) - int(e2.size()) + int(m2.num_triangles()) + 1, 2);
  EXPECT_EQ(e2.num_interior, 20u);
}

TEST(EdgeTopology, EdgeInvariants) {
  const Mesh m = bisect(build_crisscross_mesh(DomainKind::Diamond, 3), std::vector<int>{0, 5, 17});
  const auto edges = edge_topology(m);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges.edges[i];
    EXPECT_LT(e.v0, e.v1);
    if (i > 0) EXPECT_TRUE(std::tie(edges.edges[i - 1].v0, edges.edges[i - 1].v1) < std::tie(e.v0, e.v1));
    EXPECT_GT(e.length, 0.0);
    const Vec2 mid = midpoint(m.vertex(e.v0), m.vertex(e.v1));
    EXPECT_EQ(e.midpoint, mid);
    EXPECT_NEAR(norm(e.normal), 1.0, 1e-14);
    EXPECT_NEAR(dot(e.normal, m.vertex(e.v1) - m.vertex(e.v0)), 0.0, 1e-14);
    if (e.interior()) {
      EXPECT_LT(e.triangles[0], e.triangles[1]);
      const auto c = [&](int t) {
        const auto g = element_geometry(m, t);
        return g.point({1.0 / 3, 1.0 / 3, 1.0 / 3});
      };
      EXPECT_GT(dot(e.normal, c(e.triangles[1]) - c(e.triangles[0])), 0.0);
    } else {
      EXPECT_TRUE(m.is_boundary_vertex(e.v0) && m.is_boundary_vertex(e.v1));
    }
  }
}

TEST(EdgeTopology, HangingNodeIsRejected) {
  // The diagonal of the first triangle is split on the other side only.
  const Mesh m = make_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}}, {{0, 1, 2}, {0, 4, 3}, {4, 2, 3}},
                           Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  EXPECT_THROW(edge_topology(m), TopologyError);
}

TEST(Bisect, EmptyMarkedKeepsTopology) {
  const Mesh m = build_crisscross_mesh(DomainKind::Square, 2);
  const Mesh r = bisect(m, std::vector<int>{});
  EXPECT_EQ(r.num_triangles(), m.num_triangles());
  EXPECT_EQ(r.triangles(), m.triangles());
  EXPECT_EQ(r.vertices(), m.vertices());
}

TEST(Bisect, SingleTriangle) {
  const Mesh r = bisect(single_triangle(), std::vector<int>{0});
  ASSERT_EQ(r.num_triangles(), 2u);
  ASSERT_EQ(r.num_vertices(), 4u);
  EXPECT_EQ(r.vertex(3), (Vec2{0.5, 0.5}));
  for (int t = 0; t < 2; ++t) {
    const auto& tri = r.triangle(t);
    EXPECT_TRUE(tri[0] == 3 || tri[1] == 3 || tri[2] == 3);
    EXPECT_EQ(r.generation(t), 1);
    EXPECT_EQ(r.parent(t), 0);
    // Refinement edge is opposite the newest vertex.
    EXPECT_EQ(tri[r.refinement_edge(t)], 3);
  }
  EXPECT_NEAR(r.total_area(), 0.5, 1e-15);
}

TEST(Bisect, MarkAllOnCoarseCrissCross) {
  // Hand trace: each triangle's refinement edge is its boundary side, so
  // no closure is needed: 4 new boundary midpoints and 8 triangles.
  const Mesh r = bisect(build_crisscross_mesh(DomainKind::Square, 1), std::vector<int>{0, 1, 2, 3});
  EXPECT_EQ(r.num_triangles(), 8u);
  EXPECT_EQ(r.num_vertices(), 9u);
  EXPECT_TRUE(checks::mesh_shape(r, 0.0).empty());
}

TEST(Bisect, ClosureKeepsConformity) {
  Mesh m = build_crisscross_mesh(DomainKind::Diamond, 2);
  for (int step = 0; step < 8; ++step) {
    const std::vector<int> marked{int(m.num_triangles()) / 2};
    const Mesh r = bisect(m, marked);
    EXPECT_GT(r.num_triangles(), m.num_triangles());
    const auto v = checks::mesh_shape(r, 0.0);
    EXPECT_TRUE(v.empty()) << checks::join(v);
    m = r;
  }
}

TEST(Bisect, MinimumAngleIsBoundedUnderUniformRefinement) {
  Mesh m = build_crisscross_mesh(DomainKind::Square, 1);
  std::vector<double> angles;
  for (int level = 1; level <= 10; ++level) {
    m = bisect_all(m);
    angles.push_back(m.min_angle());
    EXPECT_NEAR(m.total_area(), 9.0, 9e-12);
  }
  EXPECT_EQ(m.num_triangles(), 4u << 10);
  for (std::size_t i = 2; i < angles.size(); ++i) EXPECT_GE(angles[i], angles[1] - 1e-12);
}

TEST(Bisect, Deterministic) {
  const Mesh m = build_crisscross_mesh(DomainKind::Diamond, 3);
  const std::vector<int> marked{1, 7, 20, 33};
  EXPECT_TRUE(bisect(m, marked) == bisect(m, marked));
}

TEST(ElementGeometry, Examples) {
  const auto right = element_geometry({Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}});
  EXPECT_DOUBLE_EQ(right.area, 0.5);
  EXPECT_DOUBLE_EQ(right.diameter, std::sqrt(2.0));

  const auto eq = element_geometry({Vec2{0, 0}, Vec2{1, 0}, Vec2{0.5, std::sqrt(3.0) / 2}});
  EXPECT_NEAR(eq.area, std::sqrt(3.0) / 4, 1e-15);
  for (double h : eq.edge_lengths) EXPECT_NEAR(h, 1.0, 1e-15);

  const auto g = element_geometry({Vec2{0, 0}, Vec2{2, 0}, Vec2{0, 1}});
  EXPECT_DOUBLE_EQ(g.area, 1.0);
  EXPECT_DOUBLE_EQ(g.diameter, std::sqrt(5.0));
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(norm(g.normals[k]), 1.0, 1e-15);
    // Outward: points away from the opposite vertex.
    EXPECT_GT(dot(g.normals[k], g.edge_midpoint(k) - g.vertices[k]), 0.0);
  }
}

TEST(Mesh, DumpFormat) {
  std::ostringstream os;
  write_mesh(os, single_triangle());
  EXPECT_EQ(os.str(), "1 3\n0 0\n1 0\n0 1\n0 1 2 0 0\n");
}
