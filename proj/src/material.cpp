// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/material.hpp"

#include <algorithm>
#include <cmath>

namespace weaksym {

namespace {

double effective_lambda(double mu, double lambda, PlaneMode mode) {
  return mode == PlaneMode::Stress ? 2.0 * mu * lambda / (lambda + 2.0 * mu) : lambda;
}

}  // namespace

Material Material::from_young_poisson(double E, double nu, PlaneMode mode) {
  if (E <= 0.0) throw ValidationError("Material: Young modulus must be positive");
  if (nu < 0.0 || nu >= 0.5)
    throw ValidationError("Material: Poisson ratio must lie in [0, 0.5)");
  Material m;
  m.mode = mode;
  m.mu = E / (2.0 * (1.0 + nu));
  m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  m.lambda_eff = effective_lambda(m.mu, m.lambda, mode);
  m.kolosov = 3.0 - 4.0 * nu;
  return m;
}

Material Material::from_lame(double mu, double lambda, PlaneMode mode) {
  if (mu <= 0.0) throw ValidationError("Material: shear modulus must be positive");
  if (lambda < 0.0) throw ValidationError("Material: lambda must be nonnegative");
  Material m;
  m.mode = mode;
  m.mu = mu;
  m.lambda = lambda;
  m.lambda_eff = effective_lambda(mu, lambda, mode);
  const double nu = lambda / (2.0 * (lambda + mu));
  m.kolosov = 3.0 - 4.0 * nu;
  return m;
}

Mat2 Material::compliance(const Mat2& tau) const {
  const double c = lambda_eff / (2.0 * mu + 2.0 * lambda_eff) * tau.trace();
  return Mat2(tau(0, 0) - c, tau(0, 1), tau(1, 0), tau(1, 1) - c) * (0.5 / mu);
}

Mat2 Material::elasticity(const Mat2& eps) const {
  const double scale = std::max(1.0, frob(eps));
  if (std::abs(eps(0, 1) - eps(1, 0)) > 1e-12 * scale)
    throw ValidationError("Material::elasticity: input tensor is not symmetric");
  const double t = lambda_eff * eps.trace();
  return {2.0 * mu * eps(0, 0) + t, 2.0 * mu * eps(0, 1), 2.0 * mu * eps(1, 0),
          2.0 * mu * eps(1, 1) + t};
}

double Material::compliance_energy(const Mat2& tau) const {
  const double tr = tau.trace();
  return (ddot(tau, tau) - lambda_eff / (2.0 * mu + 2.0 * lambda_eff) * tr * tr) * (0.5 / mu);
}

}  // namespace weaksym
