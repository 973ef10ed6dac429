// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <array>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "weaksym/tensor.hpp"

namespace weaksym {

struct BoundaryTag {
  enum class Kind { Interior, Dirichlet, Neumann };
  Kind kind = Kind::Interior;
  std::string label;  // Neumann load label, empty otherwise

  bool operator==(const BoundaryTag&) const = default;
};

struct Triangle {
  std::array<int, 3> v;  // vertex ids, positively oriented
  int peak = 0;          // newest vertex; the refinement edge is opposite v[peak]
  int generation = 0;
};

struct MeshEdge {
  int a = -1, b = -1;               // vertex ids, a < b
  std::array<int, 2> tri{-1, -1};   // adjacent triangles (tri[1] = -1 on boundary)
  BoundaryTag tag;

  bool boundary() const { return tri[1] < 0; }
};

/// Conforming triangulation with edge topology, boundary tags and
/// newest-vertex bisection metadata. Instances are immutable once built;
/// refinement returns a new mesh.
class Mesh2D {
 public:
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<MeshEdge> edges;
  std::vector<std::array<int, 3>> tri_edges;  // tri_edges[t][i]: edge opposite vertex i

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  /// Refinement edge (edge id opposite the peak vertex) of triangle t.
  int refinement_edge(int t) const { return tri_edges[t][triangles[t].peak]; }
  double area(int t) const;
  double total_area() const;
  Vec2 centroid(int t) const;
  /// The triangle on the other side of edge e, or -1.
  int neighbor(int t, int e) const;

  /// Validates all Mesh2D invariants (orientation, edge sharing counts,
  /// boundary tag partition). Throws ValidationError on violation.
  void validate() const;
};

/// Builds edge table/adjacency from vertices+triangles and classifies the
/// boundary. `boundary_tags` maps sorted vertex pairs to tags; every boundary
/// edge must be covered.
Mesh2D finalize_mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                     const std::vector<std::pair<std::pair<int, int>, BoundaryTag>>& boundary_tags);

/// Hardcoded coarse meshes of the benchmark domains, uniformly refined
/// (resolution - 1) times. Names: "lshape", "cook", "unit_square".
Mesh2D builtin_geometry(const std::string& name, int resolution);

/// Red refinement: every triangle split into 4 congruent children; refinement
/// edges reassigned by the longest-edge rule.
Mesh2D uniform_refine(const Mesh2D& mesh);

/// Newest-vertex bisection of the marked triangles with recursive conforming
/// closure. Every marked triangle is subdivided at least once.
Mesh2D bisect_refine(const Mesh2D& mesh, const std::set<int>& marked);

/// Per-element geometric data for assembly and integration.
struct ElementGeometry {
  std::array<Vec2, 3> v;
  double area = 0.0;
  double h = 0.0;          // longest edge
  Vec2 centroid;
  Mat2 jac;                // columns v1-v0, v2-v0 (reference -> physical)
  Mat2 jac_inv;
  std::array<Vec2, 3> outward_normal;  // per local edge (edge i opposite vertex i)
  std::array<double, 3> edge_len;
};

struct EdgeGeometry {
  Vec2 lo, hi;     // endpoints ordered by vertex id (boundary: still lo<hi by id)
  double length = 0.0;
  Vec2 normal;     // global orientation; outward on boundary edges
};

ElementGeometry element_geometry(const Mesh2D& mesh, int t);
EdgeGeometry edge_geometry(const Mesh2D& mesh, int e);

/// Map a physical point to reference coordinates of triangle t.
Vec2 to_reference(const ElementGeometry& geo, Vec2 p);

/// Plain-text mesh exchange format "msh2d v1".
void write_msh2d(std::ostream& os, const Mesh2D& mesh);
Mesh2D read_msh2d(std::istream& is);

}  // namespace weaksym
