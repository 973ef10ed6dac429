// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <Eigen/Dense>

#include <vector>

#include "weaksym/families.hpp"
#include "weaksym/mesh.hpp"
#include "weaksym/polynomial.hpp"

namespace weaksym {

struct StressDof {
  enum class Kind { Edge, Interior, Bubble };
  Kind kind = Kind::Interior;
  int local_edge = -1;  // Edge: which element edge (opposite vertex local_edge)
  int row = -1;         // Edge: which tensor row
  int moment = -1;      // Edge: Legendre moment index on the edge
  int ordinal = -1;     // position within the element interior block (non-edge)
};

/// Tensor-valued H(div) stress basis on one physical element, built without a
/// Piola transform: the dual basis of moment functionals is obtained by
/// inverting a Vandermonde matrix on the element itself.
///
/// Edge degrees of freedom are moments of tau*n against orthonormal Legendre
/// polynomials in the global edge parameterization (lo -> hi vertex id), with
/// the global edge normal. Neighboring elements therefore produce identical
/// traces for a shared degree of freedom, and interior basis functions have
/// exactly vanishing normal traces.
class ElementStressBasis {
 public:
  ElementStressBasis(const Mesh2D& mesh, int t, const FamilyConfig& cfg);

  int size() const { return static_cast<int>(dofs_.size()); }
  const std::vector<StressDof>& dofs() const { return dofs_; }
  const ElementGeometry& geometry() const { return geo_; }
  /// Moments per row per edge (edge_moment_degree()+1).
  int edge_moments() const { return n_moments_; }
  int interior_count() const { return n_interior_; }

  Mat2 value(int i, Vec2 p) const;
  Vec2 divergence(int i, Vec2 p) const;
  /// tau*n with the global normal of the given local edge, at a physical point
  /// on that edge.
  Vec2 normal_trace(int i, int local_edge, Vec2 p) const;

  /// All basis values / divergences at one point (out arrays of length size()).
  void eval_all(Vec2 p, Mat2* out) const;
  void eval_all_div(Vec2 p, Vec2* out) const;

  /// 1-norm condition estimate of the dual-functional Vandermonde.
  double vandermonde_condition() const { return condition_; }
  /// Global normal used for the given local edge.
  Vec2 edge_normal(int local_edge) const { return edge_normal_[local_edge]; }

 private:
  Vec2 scaled(Vec2 p) const { return (p - geo_.centroid) / geo_.h; }
  Vec2 vec_value(int col, Vec2 zeta) const;
  double vec_div_scaled(int col, Vec2 zeta) const;

  FamilyConfig cfg_;
  ElementGeometry geo_;
  std::array<Vec2, 3> edge_normal_;   // global normals per local edge
  std::array<double, 3> edge_h_;
  std::array<std::array<Vec2, 2>, 3> edge_ends_;  // physical lo/hi per local edge

  int n_moments_ = 0;   // kept moments per row per edge
  int n_interior_ = 0;  // interior + bubble dofs per element
  std::vector<StressDof> dofs_;

  // P-part: dual coefficients over vector monomials (2*npk x n_vec columns);
  // column order: edge (le,m) for m<=k, then interior functionals.
  int npk_ = 0;
  std::vector<std::pair<int, int>> exps_;
  Eigen::MatrixXd coef_;
  // Map element dof -> (tensor row, vector column); -1 row marks bubbles.
  std::vector<std::pair<int, int>> pmap_;

  // SGG bubbles: rows[b][r][c] as Poly2 in scaled coordinates; physical value
  // = scale[b] * rows(zeta).
  struct Bubble {
    std::array<std::array<Poly2, 2>, 2> rows;
    std::array<Poly2, 2> div;  // coefficient-level divergence, ~0
    double scale = 1.0;
  };
  std::vector<Bubble> bubbles_;

  double condition_ = 0.0;
};

}  // namespace weaksym
