// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include "weaksym/tensor.hpp"

namespace weaksym {

enum class PlaneMode { Strain, Stress };

/// Isotropic linear-elastic constitutive law in 2D. The compliance C and the
/// elasticity A = C^{-1} act on 2x2 tensors with the effective second Lame
/// parameter: lambda for plane strain, 2*mu*lambda/(lambda+2*mu) for plane
/// stress.
struct Material {
  PlaneMode mode = PlaneMode::Strain;
  double mu = 0.0;
  double lambda = 0.0;
  double lambda_eff = 0.0;
  /// Kolosov constant 3 - 4*nu (plane-strain convention), used by the
  /// closed-form L-shape fields.
  double kolosov = 0.0;

  static Material from_young_poisson(double E, double nu, PlaneMode mode);
  static Material from_lame(double mu, double lambda, PlaneMode mode);

  /// C tau = (1/2mu) (tau - lambda_eff/(2mu + 2 lambda_eff) tr(tau) I).
  Mat2 compliance(const Mat2& tau) const;

  /// A eps = 2 mu eps + lambda_eff tr(eps) I. Requires eps symmetric to 1e-12.
  Mat2 elasticity(const Mat2& eps) const;

  /// (C tau) : tau, the pointwise compliance-energy density.
  double compliance_energy(const Mat2& tau) const;
};

}  // namespace weaksym
