// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <memory>
#include <vector>

#include "weaksym/families.hpp"
#include "weaksym/mesh.hpp"
#include "weaksym/stress_basis.hpp"

namespace weaksym {

/// Global degree-of-freedom enumeration for (S_h, R_h, V_h).
/// Global vector layout: [stress | rotation | displacement]; within the stress
/// block, shared edge moments come first (edge-major), then per-element
/// interior/bubble dofs.
struct DofLayout {
  FamilyConfig cfg;
  int n_edges = 0, n_elems = 0;
  int edge_moments = 0;            // kept moments per row per edge
  int stress_interior_per_elem = 0;
  int rot_per_elem = 0;            // scalar rotation dofs per element
  int disp_scalar_per_elem = 0;    // per displacement component
  int n_S = 0, n_R = 0, n_V = 0, n_total = 0;
  int interior_base = 0;

  int stress_edge_dof(int e, int row, int m) const {
    return e * 2 * edge_moments + row * edge_moments + m;
  }
  int stress_interior_dof(int t, int ordinal) const {
    return interior_base + t * stress_interior_per_elem + ordinal;
  }
  int rot_dof(int t, int j) const { return n_S + t * rot_per_elem + j; }
  int disp_dof(int t, int comp, int j) const {
    return n_S + n_R + t * 2 * disp_scalar_per_elem + comp * disp_scalar_per_elem + j;
  }
  /// Global stress dof of local element dof `d` of basis `basis` on element t.
  int stress_dof(const Mesh2D& mesh, int t, const StressDof& d) const {
    if (d.kind == StressDof::Kind::Edge)
      return stress_edge_dof(mesh.tri_edges[t][d.local_edge], d.row, d.moment);
    return stress_interior_dof(t, d.ordinal);
  }
};

DofLayout build_dof_layout(const Mesh2D& mesh, const FamilyConfig& cfg);

/// A mesh + family bound together with lazily built per-element stress bases.
/// Reused across assembly, postprocessing and estimation within one adaptive
/// iteration.
class Discretization {
 public:
  Discretization(const Mesh2D& mesh, const FamilyConfig& cfg);

  const Mesh2D& mesh() const { return *mesh_; }
  const FamilyConfig& config() const { return cfg_; }
  const DofLayout& layout() const { return layout_; }
  const ElementStressBasis& stress_basis(int t) const;
  double max_vandermonde_condition() const;

 private:
  const Mesh2D* mesh_;
  FamilyConfig cfg_;
  DofLayout layout_;
  mutable std::vector<std::unique_ptr<ElementStressBasis>> cache_;
};

}  // namespace weaksym
