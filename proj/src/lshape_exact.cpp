// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/lshape_exact.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <functional>
#include <optional>

#include "weaksym/mesh.hpp"
#include "weaksym/quadrature.hpp"

namespace weaksym {

LShapeExact::LShapeExact(const Material& m) : material(m) {
  if (m.mode != PlaneMode::Strain)
    throw ValidationError("LShapeExact: the closed-form fields are plane strain");
}

Vec2 LShapeExact::displacement(Vec2 p) const {
  const double r = norm(p);
  if (r == 0.0) throw ValidationError("LShapeExact: evaluation at the singular corner");
  const double th = std::atan2(-p.y, -p.x);
  const double a = kAlpha, q = kQ, kap = material.kolosov;
  const double f = std::pow(r, a) / (2.0 * material.mu);
  const Vec2 u_hat{f * ((kap - q * (a + 1.0)) * std::cos(a * th) - a * std::cos((a - 2.0) * th)),
                   f * ((kap + q * (a + 1.0)) * std::sin(a * th) + a * std::sin((a - 2.0) * th))};
  return -u_hat;  // Q = -I frame change
}

Mat2 LShapeExact::stress(Vec2 p) const {
  const double r = norm(p);
  if (r == 0.0) throw ValidationError("LShapeExact: evaluation at the singular corner");
  const double th = std::atan2(-p.y, -p.x);
  const double a = kAlpha, q = kQ;
  const double f = a * std::pow(r, a - 1.0);
  const double sxx =
      f * ((2.0 - q * (a + 1.0)) * std::cos((a - 1.0) * th) - (a - 1.0) * std::cos((a - 3.0) * th));
  const double syy =
      f * ((2.0 + q * (a + 1.0)) * std::cos((a - 1.0) * th) + (a - 1.0) * std::cos((a - 3.0) * th));
  const double sxy =
      f * ((a - 1.0) * std::sin((a - 3.0) * th) + q * (a + 1.0) * std::sin((a - 1.0) * th));
  return {sxx, sxy, sxy, syy};  // invariant under the rotation by pi
}

void LShapeExact::validate_traction_free() const {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Vec2 n_upper{inv_sqrt2, -inv_sqrt2};  // outward on the face toward (1,1)
  const Vec2 n_lower{inv_sqrt2, inv_sqrt2};
  double worst = 0.0, scale = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double r = 0.01 + (1.3 - 0.01) * i / 50.0;
    const Vec2 p_up{r * inv_sqrt2, r * inv_sqrt2};
    const Vec2 p_lo{r * inv_sqrt2, -r * inv_sqrt2};
    const Mat2 s_up = stress(p_up), s_lo = stress(p_lo);
    worst = std::max({worst, norm(s_up.apply(n_upper)), norm(s_lo.apply(n_lower))});
    scale = std::max({scale, frob(s_up), frob(s_lo)});
  }
  if (worst > 1e-8 * scale)
    throw ValidationError("LShapeExact: traction-free validation failed (|sigma n| = " +
                          std::to_string(worst) + "); angle convention or constants are wrong");
}

namespace {

double integrate_lshape(const std::function<double(Vec2)>& density) {
  // Fine uniform mesh with corner-graded quadrature on the elements touching
  // the origin; the integrands are smooth elsewhere.
  Mesh2D mesh = builtin_geometry("lshape", 6);
  double acc = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry geo = element_geometry(mesh, t);
    int sv = -1;
    for (int i = 0; i < 3; ++i)
      if (norm(geo.v[i]) < 1e-14) sv = i;
    if (sv < 0) {
      for_each_tri_point(geo.v[0], geo.v[1], geo.v[2], triangle_rule(16),
                         [&](Vec2 p, double w) { acc += w * density(p); });
    } else {
      for_each_graded_tri_point(geo.v[sv], geo.v[(sv + 1) % 3], geo.v[(sv + 2) % 3],
                                triangle_rule(20), 30,
                                [&](Vec2 p, double w) { acc += w * density(p); });
    }
  }
  return acc;
}

}  // namespace

double lshape_stress_norm_C(const Material& material) {
  static std::map<std::pair<double, double>, double> cache;
  static std::mutex mtx;
  const std::pair<double, double> key{material.mu, material.lambda_eff};
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const LShapeExact exact(material);
  const double val = std::sqrt(
      integrate_lshape([&](Vec2 p) { return material.compliance_energy(exact.stress(p)); }));
  std::lock_guard<std::mutex> lock(mtx);
  cache[key] = val;
  return val;
}

double lshape_stress_norm_0() {
  static double cached = 0.0;
  static std::once_flag once;
  std::call_once(once, [] {
    const LShapeExact exact(Material::from_young_poisson(1.0, 0.3, PlaneMode::Strain));
    cached = std::sqrt(integrate_lshape([&](Vec2 p) {
      const Mat2 s = exact.stress(p);
      return ddot(s, s);
    }));
  });
  return cached;
}

}  // namespace weaksym
