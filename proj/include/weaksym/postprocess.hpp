// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <Eigen/Dense>

#include "weaksym/assembly.hpp"

namespace weaksym {

/// Global continuous Lagrange space bookkeeping for the averaging step.
struct LagrangeSpace {
  int degree = 0;
  int n_nodes = 0;
  int nodes_per_elem = 0;
  std::vector<int> elem_nodes;       // element-local lattice order -> global node
  std::vector<char> dirichlet_node;  // nodes lying on Dirichlet boundary edges
  std::vector<Vec2> node_pos;
};

LagrangeSpace build_lagrange_space(const Mesh2D& mesh, int degree);

/// Postprocessed displacements: the discontinuous elementwise lift u*_h and
/// its continuous Oswald average u^a_h (zero on Dirichlet nodes).
struct PostField {
  int lstar = 0;
  int nstar = 0;                 // dim P_{l*}
  Eigen::VectorXd u_star;        // per element: 2*nstar coeffs (component-major)
  LagrangeSpace space;
  std::vector<Vec2> u_avg;       // nodal values

  double star_coeff(int t, int comp, int j) const {
    return u_star[t * 2 * nstar + comp * nstar + j];
  }
};

/// Step I: per-element solve of P_K u* = u_h and
/// (grad u*, grad v)_K = (C sigma_h + rho_h, grad v)_K on the complement.
PostField local_postprocess(const Discretization& disc, const Material& material,
                            const MixedSolution& sol);

/// Step II: nodal averaging into the continuous space; Dirichlet nodes zeroed.
void oswald_average(const Discretization& disc, PostField& field);

Vec2 u_star_at(const Discretization& disc, const PostField& field, int t, Vec2 p);
Vec2 u_avg_at(const Discretization& disc, const PostField& field, int t, Vec2 p);
/// Full gradient (not symmetrized) of the averaged displacement.
Mat2 u_avg_gradient_at(const Discretization& disc, const PostField& field, int t, Vec2 p);
Mat2 u_star_gradient_at(const Discretization& disc, const PostField& field, int t, Vec2 p);

}  // namespace weaksym
