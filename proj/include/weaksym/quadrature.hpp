// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <array>
#include <vector>

#include "weaksym/tensor.hpp"

namespace weaksym {

constexpr int kMaxQuadOrder = 20;

/// Quadrature point on the reference triangle {(x,y) : x,y >= 0, x+y <= 1}.
struct TriQuadPoint {
  double x, y, w;
};

struct TriangleRule {
  int order = 0;
  std::vector<TriQuadPoint> points;
};

/// Quadrature point on the reference edge [0,1].
struct EdgeQuadPoint {
  double t, w;
};

struct EdgeRule {
  int order = 0;
  std::vector<EdgeQuadPoint> points;
};

/// Gauss-Legendre nodes/weights on [0,1], exact for polynomials of degree 2n-1.
std::vector<EdgeQuadPoint> gauss_legendre_01(int n);

/// Rule exact for bivariate polynomials up to total degree `order` on the
/// reference triangle (conical product of Gauss-Legendre rules; all weights
/// positive, weights sum to 1/2). Throws ValidationError outside [1, 20].
const TriangleRule& triangle_rule(int order);

/// Rule exact for degree `order` on [0,1]; weights sum to 1.
const EdgeRule& edge_rule(int order);

/// Composite rule on [0,1], geometrically graded toward t=0 with `levels`
/// dyadic pieces. Integrates endpoint singularities t^s, s > -1, to high
/// accuracy without ever sampling t=0.
std::vector<EdgeQuadPoint> graded_edge_rule_01(int order, int levels);

/// Physical-space quadrature over the triangle (a,b,c): calls fn(point, weight)
/// with weights summing to the triangle area.
template <typename Fn>
void for_each_tri_point(Vec2 a, Vec2 b, Vec2 c, const TriangleRule& rule, Fn&& fn) {
  const double jac = std::abs(cross(b - a, c - a));  // 2*area
  for (const auto& q : rule.points) {
    const Vec2 p = a + (b - a) * q.x + (c - a) * q.y;
    fn(p, q.w * jac);  // rule weights sum to 1/2 -> physical weights sum to area
  }
}

/// Physical-space quadrature over triangle (s,a,b), geometrically graded toward
/// the vertex s where the integrand may be singular. `levels` dyadic shells of
/// sub-triangles plus one core triangle at s; the base rule is applied on each.
template <typename Fn>
void for_each_graded_tri_point(Vec2 s, Vec2 a, Vec2 b, const TriangleRule& rule, int levels,
                               Fn&& fn) {
  Vec2 pa = a, pb = b;
  double scale = 1.0;
  for (int j = 0; j < levels; ++j) {
    scale *= 0.5;
    const Vec2 qa = s + (a - s) * scale;
    const Vec2 qb = s + (b - s) * scale;
    for_each_tri_point(qa, pa, pb, rule, fn);
    for_each_tri_point(qa, pb, qb, rule, fn);
    pa = qa;
    pb = qb;
  }
  for_each_tri_point(s, pa, pb, rule, fn);
}

}  // namespace weaksym
