// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "weaksym/edge_projection.hpp"
#include "weaksym/tensor.hpp"

namespace weaksym {

/// Traction data as a function of the point and the outward boundary normal.
using TractionField = std::function<Vec2(Vec2, Vec2)>;

/// Load data and (optionally) the closed-form solution of a benchmark problem.
struct ProblemData {
  VectorField body_load;                          // f
  std::map<std::string, TractionField> tractions; // one entry per Neumann label
  /// Point singularity toward which boundary/error quadrature is graded.
  std::optional<Vec2> singular_point;
  std::optional<VectorField> exact_displacement;
  std::optional<TensorField> exact_stress;
  /// ||sigma||_C and ||sigma||_0 of the exact stress (0 when unknown).
  double norm_C = 0.0;
  double norm_0 = 0.0;

  bool has_exact() const { return exact_stress.has_value(); }
};

}  // namespace weaksym
