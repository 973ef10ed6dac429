// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/dof_layout.hpp"

#include <algorithm>

namespace weaksym {

DofLayout build_dof_layout(const Mesh2D& mesh, const FamilyConfig& cfg) {
  cfg.validate();
  DofLayout lay;
  lay.cfg = cfg;
  lay.n_edges = mesh.num_edges();
  lay.n_elems = mesh.num_triangles();
  lay.edge_moments = cfg.edge_moment_degree() + 1;
  const int k = cfg.k;
  const int n_grad = pk_dim(k - 1) - 1;
  const int n_curl = k >= 2 ? pk_dim(k - 2) : 0;
  lay.stress_interior_per_elem = 2 * (n_grad + n_curl) + (cfg.has_bubbles() ? k + 1 : 0);
  lay.rot_per_elem = pk_dim(cfg.rotation_degree());
  lay.disp_scalar_per_elem = pk_dim(cfg.displacement_degree());
  lay.interior_base = lay.n_edges * 2 * lay.edge_moments;
  lay.n_S = lay.interior_base + lay.n_elems * lay.stress_interior_per_elem;
  lay.n_R = lay.n_elems * lay.rot_per_elem;
  lay.n_V = lay.n_elems * 2 * lay.disp_scalar_per_elem;
  lay.n_total = lay.n_S + lay.n_R + lay.n_V;
  return lay;
}

Discretization::Discretization(const Mesh2D& mesh, const FamilyConfig& cfg)
    : mesh_(&mesh), cfg_(cfg), layout_(build_dof_layout(mesh, cfg)) {
  cache_.resize(mesh.num_triangles());
}

const ElementStressBasis& Discretization::stress_basis(int t) const {
  if (!cache_[t]) cache_[t] = std::make_unique<ElementStressBasis>(*mesh_, t, cfg_);
  return *cache_[t];
}

double Discretization::max_vandermonde_condition() const {
  double worst = 0.0;
  for (int t = 0; t < mesh_->num_triangles(); ++t)
    worst = std::max(worst, stress_basis(t).vandermonde_condition());
  return worst;
}

}  // namespace weaksym
