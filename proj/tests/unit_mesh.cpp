#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "weaksym/mesh.hpp"

using namespace weaksym;

namespace {

// Shoelace oracle over the whole triangulation.
double shoelace_area(const Mesh2D& mesh) {
  double acc = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tr.v[0]], b = mesh.vertices[tr.v[1]], c = mesh.vertices[tr.v[2]];
    acc += 0.5 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  }
  return acc;
}

double max_h(const Mesh2D& mesh) {
  double h = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) h = std::max(h, element_geometry(mesh, t).h);
  return h;
}

// Similarity-class signature: sorted squared edge lengths normalized by the
// longest, rounded; invariant under scaling/rotation/reflection.
std::string shape_class(const Mesh2D& mesh, int t) {
  const auto geo = element_geometry(mesh, t);
  std::array<double, 3> l = geo.edge_len;
  std::sort(l.begin(), l.end());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f:%.9f", l[0] / l[2], l[1] / l[2]);
  return buf;
}

bool no_hanging_nodes(const Mesh2D& mesh) {
  // A hanging node sits strictly inside another triangle's edge.
  for (const auto& e : mesh.edges) {
    const Vec2 a = mesh.vertices[e.a], b = mesh.vertices[e.b];
    const double len = norm(b - a);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (v == e.a || v == e.b) continue;
      const Vec2 p = mesh.vertices[v];
      const double t = dot(p - a, b - a) / (len * len);
      if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
      const Vec2 proj = a + (b - a) * t;
      if (norm(p - proj) < 1e-12 * len) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("unit square coarse mesh: 2 triangles, 4 vertices, 5 edges") {
  const Mesh2D m = builtin_geometry("unit_square", 1);
  CHECK(m.num_triangles() == 2);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_edges() == 5);
  for (const auto& e : m.edges)
    if (e.boundary()) CHECK(e.tag.kind == BoundaryTag::Kind::Dirichlet);
}

TEST_CASE("cook coarse mesh: corners present, left edge Dirichlet") {
  const Mesh2D m = builtin_geometry("cook", 1);
  const std::vector<Vec2> corners = {{0, 0}, {48, 0}, {48, 60}, {0, 44}};
  for (const auto& c : corners) {
    bool found = false;
    for (const auto& v : m.vertices)
      if (norm(v - c) < 1e-12) found = true;
    CHECK(found);
  }
  for (const auto& e : m.edges) {
    if (!e.boundary()) continue;
    const bool on_left =
        std::abs(m.vertices[e.a].x) < 1e-12 && std::abs(m.vertices[e.b].x) < 1e-12;
    if (on_left) CHECK(e.tag.kind == BoundaryTag::Kind::Dirichlet);
    const bool on_right =
        std::abs(m.vertices[e.a].x - 48) < 1e-12 && std::abs(m.vertices[e.b].x - 48) < 1e-12;
    if (on_right) {
      CHECK(e.tag.kind == BoundaryTag::Kind::Neumann);
      CHECK(e.tag.label == "load");
    }
  }
}

TEST_CASE("lshape coarse mesh: re-entrant corner at origin, shoelace area 3") {
  const Mesh2D m = builtin_geometry("lshape", 1);
  bool origin = false;
  for (const auto& v : m.vertices)
    if (norm(v) < 1e-14) origin = true;
  CHECK(origin);
  // Diamond {|x|+|y|<=sqrt(2)} has area 4, the removed square area 1.
  CHECK(shoelace_area(m) == doctest::Approx(3.0).epsilon(1e-13));
  for (const auto& e : m.edges)
    if (e.boundary()) CHECK(e.tag.label == "all");
}

TEST_CASE("unknown geometry and degenerate resolution are rejected") {
  CHECK_THROWS_AS(builtin_geometry("moebius", 1), ValidationError);
  CHECK_THROWS_AS(builtin_geometry("lshape", 0), ValidationError);
}

TEST_CASE("uniform refinement: 4x elements, h halves, area preserved") {
  const Mesh2D coarse = builtin_geometry("unit_square", 1);
  const Mesh2D fine = uniform_refine(coarse);
  CHECK(fine.num_triangles() == 8);
  CHECK(max_h(fine) == doctest::Approx(0.5 * max_h(coarse)).epsilon(1e-14));
  fine.validate();

  const Mesh2D lcoarse = builtin_geometry("lshape", 1);
  const Mesh2D lfine = uniform_refine(uniform_refine(lcoarse));
  CHECK(std::abs(shoelace_area(lfine) - 3.0) < 1e-12 * 3.0);
}

TEST_CASE("bisect with empty marking returns the mesh unchanged") {
  const Mesh2D m = builtin_geometry("unit_square", 1);
  const Mesh2D r = bisect_refine(m, {});
  CHECK(r.num_triangles() == m.num_triangles());
  CHECK(r.num_vertices() == m.num_vertices());
}

TEST_CASE("bisect a single triangle: conforming, positive areas") {
  const Mesh2D m = builtin_geometry("unit_square", 1);
  const Mesh2D r = bisect_refine(m, {0});
  CHECK(r.num_triangles() >= 3);
  r.validate();
  CHECK(no_hanging_nodes(r));
  CHECK(shoelace_area(r) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bisect all: every triangle subdivided") {
  const Mesh2D m = builtin_geometry("lshape", 1);
  std::set<int> all;
  for (int t = 0; t < m.num_triangles(); ++t) all.insert(t);
  const Mesh2D r = bisect_refine(m, all);
  CHECK(r.num_triangles() >= 2 * m.num_triangles());
  r.validate();
}

TEST_CASE("random adaptive bisection keeps invariants and area; marked ids subdivide") {
  Mesh2D m = builtin_geometry("lshape", 1);
  std::mt19937 rng(42);
  for (int round = 0; round < 10; ++round) {
    std::set<int> marked;
    std::uniform_int_distribution<int> pick(0, m.num_triangles() - 1);
    const int count = 1 + round % 3;
    while (static_cast<int>(marked.size()) < count) marked.insert(pick(rng));
    const int before = m.num_triangles();
    m = bisect_refine(m, marked);
    CHECK(m.num_triangles() > before);
    m.validate();
    CHECK(shoelace_area(m) == doctest::Approx(3.0).epsilon(1e-12));
  }
  CHECK(no_hanging_nodes(m));
}

TEST_CASE("newest-vertex bisection generates finitely many similarity classes") {
  Mesh2D m = builtin_geometry("unit_square", 1);
  std::set<std::string> coarse_classes;
  for (int t = 0; t < m.num_triangles(); ++t) coarse_classes.insert(shape_class(m, t));
  std::set<std::string> classes = coarse_classes;
  std::mt19937 rng(3);
  for (int round = 0; round < 8; ++round) {
    std::set<int> marked;
    std::uniform_int_distribution<int> pick(0, m.num_triangles() - 1);
    for (int i = 0; i < 1 + m.num_triangles() / 4; ++i) marked.insert(pick(rng));
    m = bisect_refine(m, marked);
    for (int t = 0; t < m.num_triangles(); ++t) classes.insert(shape_class(m, t));
  }
  CHECK(classes.size() <= 4 * coarse_classes.size());
}

TEST_CASE("edge/triangle adjacency round-trip") {
  const Mesh2D m = uniform_refine(builtin_geometry("cook", 1));
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int i = 0; i < 3; ++i) {
      const int e = m.tri_edges[t][i];
      CHECK((m.edges[e].tri[0] == t || m.edges[e].tri[1] == t));
    }
}

TEST_CASE("geometry tables: right triangle, edge normals, jacobian") {
  std::vector<Vec2> verts = {{0, 0}, {1, 0}, {0, 1}};
  std::vector<Triangle> tris(1);
  tris[0].v = {0, 1, 2};
  BoundaryTag d{BoundaryTag::Kind::Dirichlet, ""};
  const Mesh2D m = finalize_mesh(verts, tris, {{{0, 1}, d}, {{1, 2}, d}, {{0, 2}, d}});
  const auto geo = element_geometry(m, 0);
  CHECK(geo.area == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(geo.h == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  // |det J| = 2 area
  const double det = geo.jac(0, 0) * geo.jac(1, 1) - geo.jac(0, 1) * geo.jac(1, 0);
  CHECK(std::abs(det) == doctest::Approx(2.0 * geo.area).epsilon(1e-15));

  // Edge (0,0)-(0,2): h_E = 2, unit normal +-(1,0).
  std::vector<Vec2> v2 = {{0, 0}, {0, 2}, {-1, 1}};
  std::vector<Triangle> t2(1);
  t2[0].v = {0, 1, 2};  // positively oriented: (0,0),(0,2),(-1,1)
  const Mesh2D m2 = finalize_mesh(v2, t2, {{{0, 1}, d}, {{1, 2}, d}, {{0, 2}, d}});
  for (int e = 0; e < m2.num_edges(); ++e) {
    if (m2.edges[e].a == 0 && m2.edges[e].b == 1) {
      const auto eg = edge_geometry(m2, e);
      CHECK(eg.length == doctest::Approx(2.0).epsilon(1e-15));
      CHECK(std::abs(std::abs(eg.normal.x) - 1.0) < 1e-15);
      CHECK(std::abs(eg.normal.y) < 1e-15);
      // Boundary normal is outward: triangle lies at x<0, normal points +x.
      CHECK(eg.normal.x == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("refinement metadata ids stay in range") {
  const Mesh2D m = builtin_geometry("lshape", 2);
  for (int t = 0; t < m.num_triangles(); ++t) {
    CHECK(m.triangles[t].peak >= 0);
    CHECK(m.triangles[t].peak < 3);
    CHECK(m.refinement_edge(t) >= 0);
  }
  CHECK_THROWS_AS(bisect_refine(m, {m.num_triangles()}), ValidationError);
}

TEST_CASE("msh2d round-trip") {
  Mesh2D m = builtin_geometry("cook", 2);
  m = bisect_refine(m, {0, 3});
  std::stringstream ss;
  write_msh2d(ss, m);
  const Mesh2D r = read_msh2d(ss);
  CHECK(r.num_vertices() == m.num_vertices());
  CHECK(r.num_triangles() == m.num_triangles());
  CHECK(r.num_edges() == m.num_edges());
  for (int t = 0; t < m.num_triangles(); ++t) {
    CHECK(r.triangles[t].v == m.triangles[t].v);
    CHECK(r.triangles[t].peak == m.triangles[t].peak);
  }
  std::stringstream ss2;
  write_msh2d(ss2, r);
  CHECK(ss2.str() == ss.str());
}
