// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "weaksym/mesh.hpp"
#include "weaksym/quadrature.hpp"

namespace weaksym {

using VectorField = std::function<Vec2(Vec2)>;
using TensorField = std::function<Mat2(Vec2)>;

/// L2 projection Q_E g of a vector-valued function onto [P_l(E)]^2,
/// represented by its coefficients against the orthonormal Legendre functions
/// of the edge (global lo->hi parameterization, 1/sqrt(h_E) scaling).
/// coeff[comp][m]; these coefficients double as the pinned values of the
/// Neumann stress edge dofs.
struct EdgeProjection {
  int degree = 0;
  double h = 0.0;
  Vec2 lo, hi;
  std::vector<std::array<double, 2>> coeff;  // per moment: (x,y) components

  Vec2 eval(double t) const;
};

/// Projects g with the plain edge rule, or with a rule graded toward the
/// endpoint nearest `singular` when that point coincides with one endpoint.
EdgeProjection edge_l2_project(const Mesh2D& mesh, int edge, const VectorField& g, int degree,
                               const std::optional<Vec2>& singular = std::nullopt);

/// Squared L2 distance ||g - Q_E g||^2 on the edge (same graded handling).
double edge_projection_defect2(const Mesh2D& mesh, int edge, const VectorField& g,
                               const EdgeProjection& proj,
                               const std::optional<Vec2>& singular = std::nullopt);

}  // namespace weaksym
