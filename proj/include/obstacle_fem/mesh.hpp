#pragma once

// Conforming triangulations of convex polygons: criss-cross construction,
// edge topology and newest-vertex bisection.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "obstacle_fem/errors.hpp"

namespace obstacle_fem {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr Vec2 midpoint(Vec2 a, Vec2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

/// Convex polygon given by its corners in counterclockwise order.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> corners) : corners_(std::move(corners)) {
    if (corners_.size() < 3) throw InvalidArgument("polygon needs at least 3 corners");
    if (area() <= 0.0) throw InvalidArgument("polygon corners must be counterclockwise");
    for (std::size_t i = 0; i < corners_.size(); ++i)
      for (std::size_t j = i + 1; j < corners_.size(); ++j)
        diameter_ = std::max(diameter_, norm(corners_[i] - corners_[j]));
  }

  const std::vector<Vec2>& corners() const { return corners_; }
  double diameter() const { return diameter_; }

  /// Shoelace formula.
  double area() const {
    double a = 0.0;
    for (std::size_t i = 0; i < corners_.size(); ++i)
      a += cross(corners_[i], corners_[(i + 1) % corners_.size()]);
    return 0.5 * a;
  }

  bool on_boundary(Vec2 p) const {
    const double tol = 1e-12 * diameter_;
    for (std::size_t i = 0; i < corners_.size(); ++i) {
      const Vec2 a = corners_[i];
      const Vec2 b = corners_[(i + 1) % corners_.size()];
      const Vec2 d = b - a;
      const double len2 = dot(d, d);
      const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
      if (norm(p - (a + t * d)) <= tol) return true;
    }
    return false;
  }

 private:
  std::vector<Vec2> corners_;
  double diameter_ = 0.0;
};

enum class DomainKind { Square, Diamond };

/// (-1.5, 1.5)^2
inline Polygon square_domain() {
  return Polygon({{-1.5, -1.5}, {1.5, -1.5}, {1.5, 1.5}, {-1.5, 1.5}});
}

/// Square with corners (+-1, 0), (0, +-1).
inline Polygon diamond_domain() {
  return Polygon({{-1.0, 0.0}, {0.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}});
}

using Triangle = std::array<int, 3>;

/// Local edge k of a triangle joins vertices k+1 and k+2 (mod 3), i.e. it is
/// the edge opposite local vertex k.
constexpr std::array<int, 2> local_edge_vertices(int k) { return {(k + 1) % 3, (k + 2) % 3}; }

/// Immutable conforming triangulation.
///
/// `refinement_edge(t)` is the local index of the edge that newest-vertex
/// bisection splits next; `parent(t)` is the id of the triangle in the mesh
/// this one was refined from (-1 for an initial mesh).
class Mesh {
 public:
  Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles, std::vector<int> refinement_edge,
       std::vector<int> generation, std::vector<int> parent, Polygon domain)
      : vertices_(std::move(vertices)),
        triangles_(std::move(triangles)),
        refinement_edge_(std::move(refinement_edge)),
        generation_(std::move(generation)),
        parent_(std::move(parent)),
        domain_(std::move(domain)) {
    const std::size_t nt = triangles_.size();
    if (refinement_edge_.size() != nt || generation_.size() != nt || parent_.size() != nt)
      throw InvalidArgument("mesh: per-triangle arrays have inconsistent lengths");
    for (std::size_t t = 0; t < nt; ++t) {
      for (int v : triangles_[t])
        if (v < 0 || static_cast<std::size_t>(v) >= vertices_.size())
          throw InvalidArgument("mesh: triangle " + std::to_string(t) + " references missing vertex");
      if (refinement_edge_[t] < 0 || refinement_edge_[t] > 2)
        throw InvalidArgument("mesh: bad refinement edge on triangle " + std::to_string(t));
      if (signed_area(static_cast<int>(t)) <= 0.0)
        throw TopologyError("mesh: triangle " + std::to_string(t) + " has non-positive signed area");
    }
    boundary_vertex_.resize(vertices_.size());
    for (std::size_t v = 0; v < vertices_.size(); ++v)
      boundary_vertex_[v] = domain_.on_boundary(vertices_[v]) ? 1 : 0;
  }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  Vec2 vertex(int v) const { return vertices_[v]; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  int refinement_edge(int t) const { return refinement_edge_[t]; }
  int generation(int t) const { return generation_[t]; }
  int parent(int t) const { return parent_[t]; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  const Polygon& domain() const { return domain_; }

  double signed_area(int t) const {
    const auto& tri = triangles_[t];
    return 0.5 * cross(vertices_[tri[1]] - vertices_[tri[0]], vertices_[tri[2]] - vertices_[tri[0]]);
  }

  double total_area() const {
    double a = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) a += signed_area(static_cast<int>(t));
    return a;
  }

  /// Largest triangle diameter.
  double max_diameter() const {
    double h = 0.0;
    for (const auto& tri : triangles_)
      for (int k = 0; k < 3; ++k) {
        const auto [i, j] = local_edge_vertices(k);
        h = std::max(h, norm(vertices_[tri[i]] - vertices_[tri[j]]));
      }
    return h;
  }

  /// Smallest interior angle over all triangles, in radians.
  double min_angle() const {
    double best = std::numbers::pi;
    for (const auto& tri : triangles_)
      for (int k = 0; k < 3; ++k) {
        const Vec2 a = vertices_[tri[(k + 1) % 3]] - vertices_[tri[k]];
        const Vec2 b = vertices_[tri[(k + 2) % 3]] - vertices_[tri[k]];
        best = std::min(best, std::atan2(std::abs(cross(a, b)), dot(a, b)));
      }
    return best;
  }

  friend bool operator==(const Mesh& a, const Mesh& b) {
    return a.vertices_ == b.vertices_ && a.triangles_ == b.triangles_ &&
           a.refinement_edge_ == b.refinement_edge_ && a.generation_ == b.generation_ &&
           a.parent_ == b.parent_;
  }

 private:
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<int> refinement_edge_;
  std::vector<int> generation_;
  std::vector<int> parent_;
  std::vector<std::uint8_t> boundary_vertex_;
  Polygon domain_;
};

/// Longest edge; ties go to the edge whose opposite vertex has the smallest
/// global index.
inline int longest_edge(const std::vector<Vec2>& vertices, const Triangle& tri) {
  int best = -1;
  double best_len = -1.0;
  for (int k = 0; k < 3; ++k) {
    const auto [i, j] = local_edge_vertices(k);
    const double len = norm(vertices[tri[i]] - vertices[tri[j]]);
    const double tol = 1e-12 * std::max(len, best_len);
    if (len > best_len + tol || (std::abs(len - best_len) <= tol && tri[k] < tri[best])) {
      best = k;
      best_len = len;
    }
  }
  return best;
}

/// Mesh from explicit data with refinement edges on the longest edges.
inline Mesh make_mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles, Polygon domain) {
  std::vector<int> ref(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) ref[t] = longest_edge(vertices, triangles[t]);
  const std::size_t nt = triangles.size();
  return Mesh(std::move(vertices), std::move(triangles), std::move(ref), std::vector<int>(nt, 0),
              std::vector<int>(nt, -1), std::move(domain));
}

/// Splits each of the n x n subsquares of the domain into four triangles
/// through its center. Vertices: (n+1)^2 lattice points followed by n^2
/// centers. Triangles are ordered by cell, four per cell.
inline Mesh build_crisscross_mesh(DomainKind kind, int n) {
  if (n < 1) throw InvalidArgument("build_crisscross_mesh: n must be >= 1, got " + std::to_string(n));

  // Affine map from the unit lattice [0,1]^2 onto the domain.
  Vec2 origin, e1, e2;
  Polygon domain;
  switch (kind) {
    case DomainKind::Square:
      origin = {-1.5, -1.5}, e1 = {3.0, 0.0}, e2 = {0.0, 3.0};
      domain = square_domain();
      break;
    case DomainKind::Diamond:
      origin = {-1.0, 0.0}, e1 = {1.0, -1.0}, e2 = {1.0, 1.0};
      domain = diamond_domain();
      break;
    default:
      throw InvalidArgument("build_crisscross_mesh: unsupported domain");
  }
  const auto map = [&](double s, double t) { return origin + s * e1 + t * e2; };

  const int side = n + 1;
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(side * side + n * n));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) vertices.push_back(map(double(i) / n, double(j) / n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) vertices.push_back(map((i + 0.5) / n, (j + 0.5) / n));

  std::vector<Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(4 * n * n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int bl = j * side + i, br = bl + 1, tl = bl + side, tr = tl + 1;
      const int c = side * side + j * n + i;
      triangles.push_back({c, bl, br});
      triangles.push_back({c, br, tr});
      triangles.push_back({c, tr, tl});
      triangles.push_back({c, tl, bl});
    }
  return make_mesh(std::move(vertices), std::move(triangles), std::move(domain));
}

struct Edge {
  int v0 = -1;  ///< v0 < v1
  int v1 = -1;
  std::array<int, 2> triangles{-1, -1};  ///< ascending; second is -1 on the boundary
  Vec2 midpoint;
  double length = 0.0;
  /// Unit normal pointing from triangles[0] into triangles[1] (outward on the boundary).
  Vec2 normal;

  bool interior() const { return triangles[1] >= 0; }
};

struct EdgeTable {
  std::vector<Edge> edges;  ///< lexicographic in (v0, v1)
  std::vector<std::array<int, 3>> triangle_edges;  ///< [t][k] = id of local edge k of t
  std::size_t num_interior = 0;

  std::size_t size() const { return edges.size(); }
};

/// Builds the edge table and checks conformity: every edge has one or two
/// neighbours, and single-neighbour edges lie on the domain boundary.
inline EdgeTable edge_topology(const Mesh& mesh) {
  struct Entry {
    int a, b, t, k;
  };
  std::vector<Entry> entries;
  entries.reserve(3 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(static_cast<int>(t));
    for (int k = 0; k < 3; ++k) {
      const auto [i, j] = local_edge_vertices(k);
      entries.push_back({std::min(tri[i], tri[j]), std::max(tri[i], tri[j]), static_cast<int>(t), k});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.a, x.b, x.t) < std::tie(y.a, y.b, y.t);
  });

  const auto edge_name = [&](int a, int b) {
    std::ostringstream os;
    os << "edge (" << a << ", " << b << ") at (" << mesh.vertex(a).x << ", " << mesh.vertex(a).y << ")-("
       << mesh.vertex(b).x << ", " << mesh.vertex(b).y << ")";
    return os.str();
  };

  EdgeTable table;
  table.triangle_edges.assign(mesh.num_triangles(), {-1, -1, -1});
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].a == entries[i].a && entries[j].b == entries[i].b) ++j;
    const int a = entries[i].a, b = entries[i].b;
    if (j - i > 2) throw TopologyError("edge_topology: " + edge_name(a, b) + " is shared by more than two triangles");

    Edge e;
    e.v0 = a;
    e.v1 = b;
    e.midpoint = midpoint(mesh.vertex(a), mesh.vertex(b));
    e.length = norm(mesh.vertex(b) - mesh.vertex(a));
    e.triangles[0] = entries[i].t;
    if (j - i == 2) {
      e.triangles[1] = entries[i + 1].t;
    } else if (!mesh.is_boundary_vertex(a) || !mesh.is_boundary_vertex(b) ||
               !mesh.domain().on_boundary(e.midpoint)) {
      throw TopologyError("edge_topology: nonconforming mesh, " + edge_name(a, b) +
                          " has one neighbour but does not lie on the boundary");
    }

    // Outward normal of the edge as seen from triangles[0].
    const auto& tri = mesh.triangle(e.triangles[0]);
    const auto [li, lj] = local_edge_vertices(entries[i].k);
    const Vec2 d = mesh.vertex(tri[lj]) - mesh.vertex(tri[li]);
    e.normal = (1.0 / e.length) * Vec2{d.y, -d.x};

    const int id = static_cast<int>(table.edges.size());
    for (std::size_t m = i; m < j; ++m) table.triangle_edges[entries[m].t][entries[m].k] = id;
    if (e.interior()) ++table.num_interior;
    table.edges.push_back(e);
    i = j;
  }
  return table;
}

/// Newest-vertex bisection of the marked triangles plus the closure needed to
/// restore conformity. Children record the id of the triangle they came from
/// in `mesh`.
inline Mesh bisect(const Mesh& mesh, std::span<const int> marked) {
  struct Work {
    Triangle v;
    int ref;
    int gen;
    int parent;
    bool flagged;
  };
  std::vector<Work> current;
  current.reserve(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    current.push_back({mesh.triangle(static_cast<int>(t)), mesh.refinement_edge(static_cast<int>(t)),
                       mesh.generation(static_cast<int>(t)), static_cast<int>(t), false});
  for (int t : marked) {
    if (t < 0 || static_cast<std::size_t>(t) >= mesh.num_triangles())
      throw InvalidArgument("bisect: marked triangle id " + std::to_string(t) + " out of range");
    current[t].flagged = true;
  }

  std::vector<Vec2> vertices = mesh.vertices();
  std::unordered_map<std::uint64_t, int> midpoints;
  const auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  const auto has_hanging_node = [&](const Triangle& v) {
    for (int k = 0; k < 3; ++k) {
      const auto [i, j] = local_edge_vertices(k);
      if (midpoints.contains(key(v[i], v[j]))) return true;
    }
    return false;
  };

  std::vector<Work> next;
  bool changed = true;
  while (changed) {
    changed = false;
    next.clear();
    next.reserve(current.size() + current.size() / 2);
    for (const Work& w : current) {
      if (!w.flagged && !has_hanging_node(w.v)) {
        next.push_back(w);
        continue;
      }
      changed = true;
      const int apex = w.v[w.ref];
      const int b = w.v[(w.ref + 1) % 3];
      const int c = w.v[(w.ref + 2) % 3];
      auto [it, inserted] = midpoints.try_emplace(key(b, c), static_cast<int>(vertices.size()));
      if (inserted) vertices.push_back(midpoint(vertices[b], vertices[c]));
      const int m = it->second;
      // The new vertex is the newest vertex of both children; their
      // refinement edges are opposite it.
      next.push_back({{apex, b, m}, 2, w.gen + 1, w.parent, false});
      next.push_back({{apex, m, c}, 1, w.gen + 1, w.parent, false});
    }
    std::swap(current, next);
  }

  std::vector<Triangle> triangles;
  std::vector<int> ref, gen, parent;
  triangles.reserve(current.size());
  ref.reserve(current.size());
  gen.reserve(current.size());
  parent.reserve(current.size());
  for (const Work& w : current) {
    triangles.push_back(w.v);
    ref.push_back(w.ref);
    gen.push_back(w.gen);
    parent.push_back(w.parent);
  }
  return Mesh(std::move(vertices), std::move(triangles), std::move(ref), std::move(gen), std::move(parent),
              mesh.domain());
}

inline Mesh bisect(const Mesh& mesh, const std::vector<int>& marked) {
  return bisect(mesh, std::span<const int>(marked));
}

/// Bisects every triangle once.
inline Mesh bisect_all(const Mesh& mesh) {
  std::vector<int> all(mesh.num_triangles());
  for (std::size_t t = 0; t < all.size(); ++t) all[t] = static_cast<int>(t);
  return bisect(mesh, all);
}

struct ElementGeometry {
  std::array<Vec2, 3> vertices;
  double area = 0.0;
  double diameter = 0.0;  ///< longest edge
  std::array<double, 3> edge_lengths{};  ///< edge k opposite vertex k
  std::array<Vec2, 3> normals;  ///< outward unit normals, edge k opposite vertex k
  std::array<Vec2, 3> grad_lambda;  ///< gradients of the barycentric coordinates

  /// Cartesian point of barycentric coordinates (l0, l1, l2).
  Vec2 point(const std::array<double, 3>& l) const {
    return {l[0] * vertices[0].x + l[1] * vertices[1].x + l[2] * vertices[2].x,
            l[0] * vertices[0].y + l[1] * vertices[1].y + l[2] * vertices[2].y};
  }

  /// Midpoint of local edge k.
  Vec2 edge_midpoint(int k) const {
    const auto [i, j] = local_edge_vertices(k);
    return midpoint(vertices[i], vertices[j]);
  }
};

inline ElementGeometry element_geometry(const std::array<Vec2, 3>& p) {
  ElementGeometry g;
  g.vertices = p;
  g.area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
  for (int k = 0; k < 3; ++k) {
    const auto [i, j] = local_edge_vertices(k);
    const Vec2 d = p[j] - p[i];
    g.edge_lengths[k] = norm(d);
    g.diameter = std::max(g.diameter, g.edge_lengths[k]);
    g.normals[k] = (1.0 / g.edge_lengths[k]) * Vec2{d.y, -d.x};
    g.grad_lambda[k] = (-0.5 / g.area) * Vec2{d.y, -d.x};
  }
  return g;
}

inline ElementGeometry element_geometry(const Mesh& mesh, int t) {
  if (t < 0 || static_cast<std::size_t>(t) >= mesh.num_triangles())
    throw InvalidArgument("element_geometry: triangle id " + std::to_string(t) + " out of range");
  const auto& tri = mesh.triangle(t);
  return element_geometry({mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2])});
}

/// Text dump: `ntri nvert`, one `x y` per vertex, one
/// `v0 v1 v2 refedge generation` per triangle.
inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << mesh.num_triangles() << ' ' << mesh.num_vertices() << '\n';
  os << std::setprecision(17);
  for (const Vec2& p : mesh.vertices()) os << p.x << ' ' << p.y << '\n';
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(static_cast<int>(t));
    os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << mesh.refinement_edge(static_cast<int>(t)) << ' '
       << mesh.generation(static_cast<int>(t)) << '\n';
  }
}

}  // namespace obstacle_fem
