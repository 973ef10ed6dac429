// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <Eigen/Sparse>

#include "weaksym/dof_layout.hpp"
#include "weaksym/fields.hpp"
#include "weaksym/material.hpp"

namespace weaksym {

/// The assembled mixed saddle-point system
///   (C sigma, tau) + (div tau, u) + (tau, rho)            = Neumann lift
///   (div sigma, v) + (sigma, eta)                         = -(f, v)
/// with Neumann stress dofs pinned to the moments of Q_E g, reduced to the
/// free unknowns. Pure-traction problems are gauge-fixed by pinning three
/// element-0 mean coefficients; solve_saddle then shifts the solution onto
/// the rigid-body constraints int_Omega u . r_j = 0.
struct MixedSystem {
  const Discretization* disc = nullptr;
  Eigen::SparseMatrix<double> mat;
  Eigen::VectorXd rhs;
  std::vector<int> reduced_index;  // global dof -> reduced index, -1 if pinned
  std::vector<double> pinned;      // pinned values
  int n_reduced = 0;
  bool pure_traction = false;
  /// Rigid-body load defects (f, r_j) + <g_h, r_j>; must vanish for pure traction.
  std::array<double, 3> rigid_defect{0.0, 0.0, 0.0};
  double rigid_scale = 0.0;
};

MixedSystem assemble(const Discretization& disc, const Material& material,
                     const ProblemData& problem);

struct MixedSolution {
  FamilyConfig cfg;
  Eigen::VectorXd sigma;  // n_S coefficients
  Eigen::VectorXd rho;    // n_R
  Eigen::VectorXd u;      // n_V
  /// Coefficients of the rigid-body modes subtracted to satisfy the mean
  /// constraints (pure-traction problems; zero otherwise).
  std::array<double, 3> rigid_correction{0.0, 0.0, 0.0};
  double algebraic_residual = 0.0;
};

/// Direct sparse factorization; throws SolverError on singular systems,
/// residual > 1e-10 relative, or incompatible pure-traction loads.
MixedSolution solve_saddle(const MixedSystem& system);

/// Evaluators for the discrete fields on one element.
Mat2 stress_at(const Discretization& disc, const MixedSolution& sol, int t, Vec2 p);
Vec2 stress_divergence_at(const Discretization& disc, const MixedSolution& sol, int t, Vec2 p);
/// Rotation tensor rho_h = q*J at a point.
Mat2 rotation_at(const Discretization& disc, const MixedSolution& sol, int t, Vec2 p);
Vec2 displacement_at(const Discretization& disc, const MixedSolution& sol, int t, Vec2 p);

/// Element L2 projection of a vector field onto [P_deg]^2, returned as
/// coefficients (component-major) in the reference-orthonormal scalar basis.
std::vector<double> project_onto_element(const Discretization& disc, int t, int deg,
                                         const VectorField& f);

struct DiscreteIdentityReport {
  double equilibrium_residual = 0.0;   // max_K ||div sigma_h + P_K f||_{0,K}
  double weak_symmetry_residual = 0.0; // max over R_h basis of |(sigma_h,eta)|/||eta||_0
};

DiscreteIdentityReport verify_discrete_identities(const Discretization& disc,
                                                  const MixedSolution& sol,
                                                  const ProblemData& problem);

/// Matrix dump in "i j value" coordinate text format (0-based).
void dump_system(std::ostream& os, const MixedSystem& system);

}  // namespace weaksym
