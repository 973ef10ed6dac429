// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

namespace weaksym {

namespace {

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

// Local edge i is opposite vertex i: (v[i+1], v[i+2]) mod 3.
std::pair<int, int> local_edge_verts(const Triangle& t, int i) {
  return {t.v[(i + 1) % 3], t.v[(i + 2) % 3]};
}

int longest_local_edge(const std::vector<Vec2>& verts, const Triangle& t) {
  int best = 0;
  double best_len = -1.0;
  for (int i = 0; i < 3; ++i) {
    auto [a, b] = local_edge_verts(t, i);
    const Vec2 d = verts[b] - verts[a];
    const double len = dot(d, d);
    if (len > best_len + 1e-14 * std::max(best_len, len)) {
      best = i;
      best_len = len;
    }
  }
  return best;
}

}  // namespace

double Mesh2D::area(int t) const {
  const auto& tr = triangles[t];
  return signed_area(vertices[tr.v[0]], vertices[tr.v[1]], vertices[tr.v[2]]);
}

double Mesh2D::total_area() const {
  double sum = 0.0;
  for (int t = 0; t < num_triangles(); ++t) sum += area(t);
  return sum;
}

Vec2 Mesh2D::centroid(int t) const {
  const auto& tr = triangles[t];
  return (vertices[tr.v[0]] + vertices[tr.v[1]] + vertices[tr.v[2]]) / 3.0;
}

int Mesh2D::neighbor(int t, int e) const {
  const auto& ed = edges[e];
  if (ed.tri[0] == t) return ed.tri[1];
  if (ed.tri[1] == t) return ed.tri[0];
  throw ValidationError("Mesh2D::neighbor: edge not incident to triangle");
}

void Mesh2D::validate() const {
  for (int t = 0; t < num_triangles(); ++t)
    if (area(t) <= 0.0) throw ValidationError("mesh invariant: non-positive triangle area");
  std::vector<int> count(edges.size(), 0);
  for (int t = 0; t < num_triangles(); ++t)
    for (int i = 0; i < 3; ++i) {
      const int e = tri_edges[t][i];
      auto [a, b] = local_edge_verts(triangles[t], i);
      if (edge_key(a, b) != edge_key(edges[e].a, edges[e].b))
        throw ValidationError("mesh invariant: triangle/edge incidence mismatch");
      ++count[e];
    }
  for (int e = 0; e < num_edges(); ++e) {
    const int adj = (edges[e].tri[1] >= 0) ? 2 : 1;
    if (count[e] != adj) throw ValidationError("mesh invariant: edge sharing count");
    if (edges[e].boundary() && edges[e].tag.kind == BoundaryTag::Kind::Interior)
      throw ValidationError("mesh invariant: untagged boundary edge");
    if (!edges[e].boundary() && edges[e].tag.kind != BoundaryTag::Kind::Interior)
      throw ValidationError("mesh invariant: tagged interior edge");
  }
}

Mesh2D finalize_mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                     const std::vector<std::pair<std::pair<int, int>, BoundaryTag>>& boundary_tags) {
  Mesh2D mesh;
  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);

  std::unordered_map<uint64_t, int> edge_ids;
  mesh.tri_edges.resize(mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      auto [a, b] = local_edge_verts(mesh.triangles[t], i);
      const uint64_t key = edge_key(a, b);
      auto it = edge_ids.find(key);
      int e;
      if (it == edge_ids.end()) {
        e = mesh.num_edges();
        edge_ids.emplace(key, e);
        MeshEdge ed;
        ed.a = std::min(a, b);
        ed.b = std::max(a, b);
        ed.tri[0] = t;
        mesh.edges.push_back(ed);
      } else {
        e = it->second;
        if (mesh.edges[e].tri[1] >= 0)
          throw ValidationError("finalize_mesh: edge shared by more than two triangles");
        mesh.edges[e].tri[1] = t;
      }
      mesh.tri_edges[t][i] = e;
    }
  }

  std::map<uint64_t, BoundaryTag> tags;
  for (const auto& [pair, tag] : boundary_tags) tags[edge_key(pair.first, pair.second)] = tag;
  for (auto& ed : mesh.edges) {
    if (!ed.boundary()) continue;
    auto it = tags.find(edge_key(ed.a, ed.b));
    if (it == tags.end())
      throw ValidationError("finalize_mesh: boundary edge without tag");
    ed.tag = it->second;
  }
  mesh.validate();
  return mesh;
}

namespace {

struct CoarseMesh {
  std::vector<Vec2> verts;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::pair<std::pair<int, int>, BoundaryTag>> tags;
};

Mesh2D build_coarse(const CoarseMesh& cm) {
  std::vector<Triangle> tris;
  for (const auto& t : cm.tris) {
    Triangle tr;
    tr.v = t;
    tr.generation = 0;
    tris.push_back(tr);
  }
  // Initial refinement edge: longest edge of each coarse triangle.
  for (auto& tr : tris) {
    Triangle probe = tr;
    tr.peak = longest_local_edge(cm.verts, probe);
  }
  return finalize_mesh(cm.verts, tris, cm.tags);
}

BoundaryTag neumann(const std::string& label) {
  return {BoundaryTag::Kind::Neumann, label};
}
BoundaryTag dirichlet() { return {BoundaryTag::Kind::Dirichlet, ""}; }

}  // namespace

Mesh2D builtin_geometry(const std::string& name, int resolution) {
  if (resolution < 1) throw ValidationError("builtin_geometry: resolution must be >= 1");
  CoarseMesh cm;
  if (name == "unit_square") {
    cm.verts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    cm.tris = {{0, 1, 2}, {0, 2, 3}};
    cm.tags = {{{0, 1}, dirichlet()}, {{1, 2}, dirichlet()}, {{2, 3}, dirichlet()},
               {{0, 3}, dirichlet()}};
  } else if (name == "cook") {
    cm.verts = {{0, 0}, {48, 0}, {48, 60}, {0, 44}};
    cm.tris = {{0, 1, 2}, {0, 2, 3}};
    cm.tags = {{{0, 3}, dirichlet()},
               {{1, 2}, neumann("load")},
               {{0, 1}, neumann("free")},
               {{2, 3}, neumann("free")}};
  } else if (name == "lshape") {
    // Rotated L: diamond {|x|+|y| <= sqrt(2)} minus the square
    // {|x-1/sqrt(2)|+|y| <= 1/sqrt(2)}; re-entrant corner at the origin.
    const double s = 1.0 / std::sqrt(2.0);
    const double r = std::sqrt(2.0);
    cm.verts = {{0, 0}, {s, s}, {0, r}, {-r, 0}, {0, -r}, {s, -s}};
    cm.tris = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}};
    cm.tags = {{{0, 1}, neumann("all")}, {{1, 2}, neumann("all")}, {{2, 3}, neumann("all")},
               {{3, 4}, neumann("all")}, {{4, 5}, neumann("all")}, {{0, 5}, neumann("all")}};
  } else {
    throw ValidationError("builtin_geometry: unknown name '" + name + "'");
  }
  Mesh2D mesh = build_coarse(cm);
  for (int i = 1; i < resolution; ++i) mesh = uniform_refine(mesh);
  return mesh;
}

Mesh2D uniform_refine(const Mesh2D& mesh) {
  std::vector<Vec2> verts = mesh.vertices;
  std::vector<int> midpoint(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edges[e];
    midpoint[e] = static_cast<int>(verts.size());
    verts.push_back((mesh.vertices[ed.a] + mesh.vertices[ed.b]) * 0.5);
  }
  std::vector<Triangle> tris;
  tris.reserve(mesh.triangles.size() * 4);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    // m[i]: midpoint of edge opposite vertex i.
    std::array<int, 3> m;
    for (int i = 0; i < 3; ++i) m[i] = midpoint[mesh.tri_edges[t][i]];
    const int gen = tr.generation;
    auto add = [&](int a, int b, int c) {
      Triangle child;
      child.v = {a, b, c};
      child.generation = gen;
      tris.push_back(child);
    };
    add(tr.v[0], m[2], m[1]);
    add(m[2], tr.v[1], m[0]);
    add(m[1], m[0], tr.v[2]);
    add(m[2], m[0], m[1]);
  }
  for (auto& tr : tris) tr.peak = longest_local_edge(verts, tr);

  std::vector<std::pair<std::pair<int, int>, BoundaryTag>> tags;
  for (const auto& ed : mesh.edges) {
    if (!ed.boundary()) continue;
    const int m = midpoint[&ed - mesh.edges.data()];
    tags.push_back({{ed.a, m}, ed.tag});
    tags.push_back({{m, ed.b}, ed.tag});
  }
  return finalize_mesh(std::move(verts), std::move(tris), tags);
}

namespace {

// Working state for newest-vertex bisection with recursive conforming closure.
struct Bisector {
  std::vector<Vec2> verts;
  std::vector<Triangle> tris;   // grows; children appended
  std::vector<bool> alive;
  std::unordered_map<uint64_t, std::array<int, 2>> edge2tri;
  std::unordered_map<uint64_t, int> midpoints;
  std::map<uint64_t, BoundaryTag> boundary;  // live boundary pairs
  int depth = 0;

  explicit Bisector(const Mesh2D& mesh) {
    verts = mesh.vertices;
    tris = mesh.triangles;
    alive.assign(tris.size(), true);
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) link(t);
    for (const auto& ed : mesh.edges)
      if (ed.boundary()) boundary[edge_key(ed.a, ed.b)] = ed.tag;
  }

  void link(int t) {
    for (int i = 0; i < 3; ++i) {
      auto [a, b] = local_edge_verts(tris[t], i);
      const uint64_t key = edge_key(a, b);
      auto it = edge2tri.find(key);
      if (it == edge2tri.end()) {
        edge2tri.emplace(key, std::array<int, 2>{t, -1});
      } else if (it->second[1] == -1) {
        it->second[1] = t;
      } else {
        throw ValidationError("bisect_refine: edge adjacency overflow");
      }
    }
  }

  void unlink(int t) {
    for (int i = 0; i < 3; ++i) {
      auto [a, b] = local_edge_verts(tris[t], i);
      auto it = edge2tri.find(edge_key(a, b));
      if (it == edge2tri.end()) continue;
      if (it->second[0] == t) {
        it->second[0] = it->second[1];
        it->second[1] = -1;
      } else if (it->second[1] == t) {
        it->second[1] = -1;
      }
      if (it->second[0] == -1) edge2tri.erase(it);
    }
  }

  int neighbor_across(int t, uint64_t key) const {
    auto it = edge2tri.find(key);
    if (it == edge2tri.end()) return -1;
    if (it->second[0] == t) return it->second[1];
    if (it->second[1] == t) return it->second[0];
    return -1;
  }

  uint64_t base_key(int t) const {
    auto [a, b] = local_edge_verts(tris[t], tris[t].peak);
    return edge_key(a, b);
  }

  int get_midpoint(int a, int b) {
    const uint64_t key = edge_key(a, b);
    auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    const int m = static_cast<int>(verts.size());
    verts.push_back((verts[a] + verts[b]) * 0.5);
    midpoints.emplace(key, m);
    // Boundary pairs split with tag inheritance.
    auto bt = boundary.find(key);
    if (bt != boundary.end()) {
      boundary[edge_key(a, m)] = bt->second;
      boundary[edge_key(m, b)] = bt->second;
      boundary.erase(bt);
    }
    return m;
  }

  // Split t at its refinement edge into two children with the midpoint as the
  // newest vertex. Assumes conformity was already arranged by the caller.
  void split(int t, int m) {
    const Triangle tr = tris[t];
    const int p = tr.v[tr.peak];
    const int a = tr.v[(tr.peak + 1) % 3];
    const int b = tr.v[(tr.peak + 2) % 3];
    unlink(t);
    alive[t] = false;
    auto add = [&](int x, int y, int z, int peak_vertex) {
      Triangle child;
      child.v = {x, y, z};
      for (int i = 0; i < 3; ++i)
        if (child.v[i] == peak_vertex) child.peak = i;
      child.generation = tr.generation + 1;
      const int id = static_cast<int>(tris.size());
      tris.push_back(child);
      alive.push_back(true);
      link(id);
    };
    // (p,a,b) is positively oriented; both children keep the orientation.
    add(p, a, m, m);
    add(p, m, b, m);
  }

  // Bisect t conformingly: first make the neighbor across the refinement edge
  // compatible (recursively), then split both at the shared midpoint.
  void ensure_bisected(int t) {
    if (!alive[t]) return;
    if (++depth > static_cast<int>(tris.size()) + 1000)
      throw ValidationError("bisect_refine: conforming closure failed to terminate "
                            "(inconsistent refinement-edge assignment)");
    const uint64_t key = base_key(t);
    int n = neighbor_across(t, key);
    if (n >= 0 && base_key(n) != key) {
      ensure_bisected(n);
      if (!alive[t]) {
        // The closure chain wrapped around and already split t compatibly.
        --depth;
        return;
      }
      n = neighbor_across(t, key);
    }
    auto [a, b] = local_edge_verts(tris[t], tris[t].peak);
    const int m = get_midpoint(a, b);
    split(t, m);
    if (n >= 0) {
      if (base_key(n) != key)
        throw ValidationError("bisect_refine: neighbor incompatible after closure");
      split(n, m);
    }
    --depth;
  }
};

}  // namespace

Mesh2D bisect_refine(const Mesh2D& mesh, const std::set<int>& marked) {
  for (int t : marked)
    if (t < 0 || t >= mesh.num_triangles())
      throw ValidationError("bisect_refine: marked id out of range");
  Bisector bis(mesh);
  for (int t : marked) bis.ensure_bisected(t);

  std::vector<Triangle> out;
  out.reserve(bis.tris.size());
  for (int t = 0; t < static_cast<int>(bis.tris.size()); ++t)
    if (bis.alive[t]) out.push_back(bis.tris[t]);
  std::vector<std::pair<std::pair<int, int>, BoundaryTag>> tags;
  for (const auto& [key, tag] : bis.boundary)
    tags.push_back({{static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)}, tag});
  return finalize_mesh(std::move(bis.verts), std::move(out), tags);
}

ElementGeometry element_geometry(const Mesh2D& mesh, int t) {
  ElementGeometry g;
  const auto& tr = mesh.triangles[t];
  for (int i = 0; i < 3; ++i) g.v[i] = mesh.vertices[tr.v[i]];
  g.area = signed_area(g.v[0], g.v[1], g.v[2]);
  if (g.area <= 0.0) throw ValidationError("element_geometry: degenerate triangle");
  g.centroid = (g.v[0] + g.v[1] + g.v[2]) / 3.0;
  const Vec2 e1 = g.v[1] - g.v[0], e2 = g.v[2] - g.v[0];
  g.jac = Mat2(e1.x, e2.x, e1.y, e2.y);
  const double det = e1.x * e2.y - e2.x * e1.y;
  g.jac_inv = Mat2(e2.y / det, -e2.x / det, -e1.y / det, e1.x / det);
  g.h = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec2 pa = g.v[(i + 1) % 3], pb = g.v[(i + 2) % 3];
    const Vec2 d = pb - pa;
    g.edge_len[i] = norm(d);
    g.h = std::max(g.h, g.edge_len[i]);
    Vec2 n = rot_minus90(d / g.edge_len[i]);
    // Outward: away from the opposite vertex.
    if (dot(n, (pa + pb) * 0.5 - g.v[i]) < 0.0) n = -n;
    g.outward_normal[i] = n;
  }
  return g;
}

EdgeGeometry edge_geometry(const Mesh2D& mesh, int e) {
  const auto& ed = mesh.edges[e];
  EdgeGeometry g;
  g.lo = mesh.vertices[ed.a];
  g.hi = mesh.vertices[ed.b];
  g.length = norm(g.hi - g.lo);
  g.normal = rot_minus90((g.hi - g.lo) / g.length);
  if (ed.boundary()) {
    // Boundary normals point outward.
    const Vec2 mid = (g.lo + g.hi) * 0.5;
    if (dot(g.normal, mid - mesh.centroid(ed.tri[0])) < 0.0) g.normal = -g.normal;
  }
  return g;
}

Vec2 to_reference(const ElementGeometry& geo, Vec2 p) {
  return geo.jac_inv.apply(p - geo.v[0]);
}

void write_msh2d(std::ostream& os, const Mesh2D& mesh) {
  os.precision(17);
  os << "msh2d v1\n";
  os << "vertices " << mesh.num_vertices() << "\n";
  for (const auto& v : mesh.vertices) os << v.x << " " << v.y << "\n";
  os << "triangles " << mesh.num_triangles() << "\n";
  for (const auto& t : mesh.triangles)
    os << t.v[0] << " " << t.v[1] << " " << t.v[2] << " " << t.peak << " " << t.generation << "\n";
  int nb = 0;
  for (const auto& e : mesh.edges)
    if (e.boundary()) ++nb;
  os << "boundary " << nb << "\n";
  for (const auto& e : mesh.edges) {
    if (!e.boundary()) continue;
    os << e.a << " " << e.b << " ";
    if (e.tag.kind == BoundaryTag::Kind::Dirichlet)
      os << "D\n";
    else
      os << "N " << e.tag.label << "\n";
  }
}

Mesh2D read_msh2d(std::istream& is) {
  std::string word, version;
  is >> word >> version;
  if (word != "msh2d" || version != "v1") throw ValidationError("read_msh2d: bad header");
  int nv = 0;
  is >> word >> nv;
  if (word != "vertices" || nv < 3) throw ValidationError("read_msh2d: bad vertex section");
  std::vector<Vec2> verts(nv);
  for (auto& v : verts) is >> v.x >> v.y;
  int nt = 0;
  is >> word >> nt;
  if (word != "triangles" || nt < 1) throw ValidationError("read_msh2d: bad triangle section");
  std::vector<Triangle> tris(nt);
  for (auto& t : tris) is >> t.v[0] >> t.v[1] >> t.v[2] >> t.peak >> t.generation;
  int nb = 0;
  is >> word >> nb;
  if (word != "boundary") throw ValidationError("read_msh2d: bad boundary section");
  std::vector<std::pair<std::pair<int, int>, BoundaryTag>> tags;
  for (int i = 0; i < nb; ++i) {
    int a, b;
    std::string kind;
    is >> a >> b >> kind;
    BoundaryTag tag;
    if (kind == "D") {
      tag.kind = BoundaryTag::Kind::Dirichlet;
    } else if (kind == "N") {
      tag.kind = BoundaryTag::Kind::Neumann;
      is >> tag.label;
    } else {
      throw ValidationError("read_msh2d: bad boundary tag");
    }
    tags.push_back({{a, b}, tag});
  }
  if (!is) throw ValidationError("read_msh2d: truncated file");
  return finalize_mesh(std::move(verts), std::move(tris), tags);
}

}  // namespace weaksym
