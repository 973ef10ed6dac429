// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/edge_projection.hpp"

#include <cmath>

#include "weaksym/polynomial.hpp"

namespace weaksym {

namespace {

constexpr int kGradedLevels = 60;  // ~2^(-60*alpha) residual mass for r^alpha data
constexpr int kEdgeOrder = 16;

// Quadrature on [0,1]; graded toward t=0 or t=1 when that endpoint is
// singular. Smooth edges get a composite rule: a single Gauss panel on a long
// coarse-mesh edge leaves ~1e-8 moment errors in non-polynomial tractions,
// which would dominate the discrete equilibrium defect.
std::vector<EdgeQuadPoint> edge_points(Vec2 lo, Vec2 hi, const std::optional<Vec2>& singular) {
  if (singular) {
    const double h = norm(hi - lo);
    const double tol = 1e-12 * std::max(1.0, h);
    if (norm(lo - *singular) < tol) return graded_edge_rule_01(kEdgeOrder, kGradedLevels);
    if (norm(hi - *singular) < tol) {
      auto pts = graded_edge_rule_01(kEdgeOrder, kGradedLevels);
      for (auto& p : pts) p.t = 1.0 - p.t;
      return pts;
    }
  }
  const auto& base = edge_rule(kEdgeOrder).points;
  std::vector<EdgeQuadPoint> pts;
  pts.reserve(4 * base.size());
  for (int piece = 0; piece < 4; ++piece)
    for (const auto& p : base) pts.push_back({(piece + p.t) * 0.25, p.w * 0.25});
  return pts;
}

}  // namespace

Vec2 EdgeProjection::eval(double t) const {
  Vec2 v;
  const double s = 1.0 / std::sqrt(h);
  for (int m = 0; m <= degree; ++m) {
    const double leg = legendre_orthonormal_01(m, t) * s;
    v.x += coeff[m][0] * leg;
    v.y += coeff[m][1] * leg;
  }
  return v;
}

EdgeProjection edge_l2_project(const Mesh2D& mesh, int edge, const VectorField& g, int degree,
                               const std::optional<Vec2>& singular) {
  const EdgeGeometry eg = edge_geometry(mesh, edge);
  EdgeProjection proj;
  proj.degree = degree;
  proj.h = eg.length;
  proj.lo = eg.lo;
  proj.hi = eg.hi;
  proj.coeff.assign(degree + 1, {0.0, 0.0});
  const double s = 1.0 / std::sqrt(eg.length);
  for (const auto& q : edge_points(eg.lo, eg.hi, singular)) {
    const Vec2 p = eg.lo + (eg.hi - eg.lo) * q.t;
    const Vec2 val = g(p);
    const double w = q.w * eg.length;
    for (int m = 0; m <= degree; ++m) {
      const double leg = legendre_orthonormal_01(m, q.t) * s;
      proj.coeff[m][0] += w * leg * val.x;
      proj.coeff[m][1] += w * leg * val.y;
    }
  }
  return proj;
}

double edge_projection_defect2(const Mesh2D& mesh, int edge, const VectorField& g,
                               const EdgeProjection& proj,
                               const std::optional<Vec2>& singular) {
  const EdgeGeometry eg = edge_geometry(mesh, edge);
  double acc = 0.0;
  for (const auto& q : edge_points(eg.lo, eg.hi, singular)) {
    const Vec2 p = eg.lo + (eg.hi - eg.lo) * q.t;
    const Vec2 d = g(p) - proj.eval(q.t);
    acc += q.w * eg.length * dot(d, d);
  }
  return acc;
}

}  // namespace weaksym
