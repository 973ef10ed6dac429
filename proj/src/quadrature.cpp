// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/quadrature.hpp"

#include <cmath>
#include <mutex>

namespace weaksym {

namespace {

// Legendre P_n and P_n' on [-1,1] by the three-term recurrence.
void legendre_value_deriv(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

std::vector<EdgeQuadPoint> gauss_legendre_01(int n) {
  if (n < 1) throw ValidationError("gauss_legendre_01: need at least one point");
  std::vector<EdgeQuadPoint> pts(n);
  for (int i = 0; i < n / 2 + n % 2; ++i) {
    // Chebyshev-based initial guess, then Newton.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre_value_deriv(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre_value_deriv(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Nodes come out in decreasing x; store symmetric pair mapped to [0,1].
    pts[i] = {0.5 * (1.0 - x), 0.5 * w};
    pts[n - 1 - i] = {0.5 * (1.0 + x), 0.5 * w};
  }
  if (n % 2 == 1) pts[n / 2].t = 0.5;
  return pts;
}

namespace {

TriangleRule make_triangle_rule(int order) {
  // Conical product: x = u(1-v), y = v with Jacobian (1-v) folded into the
  // weight. Needs degree `order` in u and `order+1` in v.
  const int m = (order + 3) / 2;
  const auto gu = gauss_legendre_01(m);
  const auto gv = gauss_legendre_01(m);
  TriangleRule rule;
  rule.order = order;
  rule.points.reserve(static_cast<std::size_t>(m) * m);
  for (const auto& pv : gv)
    for (const auto& pu : gu)
      rule.points.push_back({pu.t * (1.0 - pv.t), pv.t, pu.w * pv.w * (1.0 - pv.t)});
  // Weights sum to 1/2 (reference triangle measure).
  return rule;
}

EdgeRule make_edge_rule(int order) {
  EdgeRule rule;
  rule.order = order;
  rule.points.reserve((order + 2) / 2 + 1);
  for (const auto& p : gauss_legendre_01((order + 2) / 2 + 1)) rule.points.push_back({p.t, p.w});
  return rule;
}

}  // namespace

const TriangleRule& triangle_rule(int order) {
  if (order < 1 || order > kMaxQuadOrder)
    throw ValidationError("triangle_rule: unsupported order " + std::to_string(order));
  static std::array<TriangleRule, kMaxQuadOrder + 1> cache;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int o = 1; o <= kMaxQuadOrder; ++o) cache[o] = make_triangle_rule(o);
  });
  return cache[order];
}

const EdgeRule& edge_rule(int order) {
  if (order < 1 || order > kMaxQuadOrder)
    throw ValidationError("edge_rule: unsupported order " + std::to_string(order));
  static std::array<EdgeRule, kMaxQuadOrder + 1> cache;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int o = 1; o <= kMaxQuadOrder; ++o) cache[o] = make_edge_rule(o);
  });
  return cache[order];
}

std::vector<EdgeQuadPoint> graded_edge_rule_01(int order, int levels) {
  const EdgeRule& base = edge_rule(order);
  std::vector<EdgeQuadPoint> pts;
  pts.reserve(base.points.size() * (levels + 1));
  double hi = 1.0;
  for (int j = 0; j < levels; ++j) {
    const double lo = 0.5 * hi;
    for (const auto& p : base.points) pts.push_back({lo + p.t * (hi - lo), p.w * (hi - lo)});
    hi = lo;
  }
  for (const auto& p : base.points) pts.push_back({p.t * hi, p.w * hi});
  return pts;
}

}  // namespace weaksym
