// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include "weaksym/material.hpp"

namespace weaksym {

/// Closed-form singular solution of the traction-free re-entrant corner on
/// the rotated-L domain (corner at the origin, material centered on the
/// negative x axis, opening angle 3*pi/2). Plane strain; defined up to
/// rigid-body displacements and rotations.
///
/// Angle convention: theta = atan2(-y, -x) in (-3pi/4, 3pi/4), i.e. a frame
/// rotated by pi so the material symmetry axis is theta = 0; fields transform
/// back with Q = -I (stresses unchanged, displacement negated).
struct LShapeExact {
  static constexpr double kAlpha = 0.544483737;
  static constexpr double kQ = 0.543075579;

  Material material;  // must be plane strain; kappa = 3 - 4 nu

  explicit LShapeExact(const Material& m);

  Vec2 displacement(Vec2 p) const;
  Mat2 stress(Vec2 p) const;

  /// Samples sigma*n on both re-entrant faces; throws ValidationError when
  /// the traction-free property fails beyond 1e-8 relative (wrong angle
  /// convention or constants).
  void validate_traction_free() const;
};

/// ||sigma||_C over the L-shape domain for the given material (fine-mesh
/// quadrature graded at the corner; deterministic).
double lshape_stress_norm_C(const Material& material);
/// ||sigma||_0 (material-independent).
double lshape_stress_norm_0();

}  // namespace weaksym
