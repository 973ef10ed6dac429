#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "doctest.h"
#include "weaksym/dof_layout.hpp"
#include "weaksym/edge_projection.hpp"
#include "weaksym/polynomial.hpp"
#include "weaksym/quadrature.hpp"
#include "weaksym/stress_basis.hpp"

using namespace weaksym;

namespace {

Mesh2D single_triangle(Vec2 a, Vec2 b, Vec2 c) {
  std::vector<Vec2> verts = {a, b, c};
  std::vector<Triangle> tris(1);
  tris[0].v = {0, 1, 2};
  if (cross(b - a, c - a) < 0) tris[0].v = {0, 2, 1};
  BoundaryTag d{BoundaryTag::Kind::Dirichlet, ""};
  return finalize_mesh(verts, tris, {{{0, 1}, d}, {{1, 2}, d}, {{0, 2}, d}});
}

Mesh2D random_triangle(std::mt19937& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> logs(-3.0, 1.5);
  for (;;) {
    Vec2 a{uni(rng), uni(rng)}, b{uni(rng), uni(rng)}, c{uni(rng), uni(rng)};
    const double scale = std::pow(10.0, logs(rng));
    a = a * scale;
    b = b * scale;
    c = c * scale;
    if (std::abs(cross(b - a, c - a)) > 0.1 * scale * scale)
      return single_triangle(a, b, c);
  }
}

// Applies the edge-moment functional (le, row, m) to a tensor function.
double edge_moment(const Mesh2D& mesh, int t, int le, int row, int m,
                   const ElementStressBasis& basis, int fn) {
  const int e = mesh.tri_edges[t][le];
  const auto eg = edge_geometry(mesh, e);
  double acc = 0.0;
  for (const auto& q : edge_rule(16).points) {
    const Vec2 p = eg.lo + (eg.hi - eg.lo) * q.t;
    const Vec2 tn = basis.normal_trace(fn, le, p);
    const double leg = legendre_orthonormal_01(m, q.t) / std::sqrt(eg.length);
    acc += q.w * eg.length * leg * (row == 0 ? tn.x : tn.y);
  }
  return acc;
}

}  // namespace

TEST_CASE("element stress dimensions per family") {
  const Mesh2D m = single_triangle({0, 0}, {1, 0}, {0, 1});
  CHECK(ElementStressBasis(m, 0, {Family::AFW, 2}).size() == 24);
  CHECK(ElementStressBasis(m, 0, {Family::RAFW, 2}).size() == 18);
  // SGG appends k+1 independent curl bubbles (homogeneous degree-k generators;
  // lower-degree generators fall inside [P_k]^{2x2}).
  CHECK(ElementStressBasis(m, 0, {Family::SGG, 2}).size() == 27);
  CHECK(ElementStressBasis(m, 0, {Family::SGG, 3}).size() == 44);
  int bubbles = 0;
  const ElementStressBasis sgg(m, 0, {Family::SGG, 2});
  for (const auto& d : sgg.dofs())
    if (d.kind == StressDof::Kind::Bubble) ++bubbles;
  CHECK(bubbles == 3);
}

TEST_CASE("dual property: edge moments of basis functions are Kronecker deltas") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 4; ++trial) {
    const Mesh2D m = random_triangle(rng);
    for (const FamilyConfig cfg :
         {FamilyConfig{Family::AFW, 2}, FamilyConfig{Family::RAFW, 2}, FamilyConfig{Family::SGG, 2}}) {
      const ElementStressBasis basis(m, 0, cfg);
      CHECK(std::isfinite(basis.vandermonde_condition()));
      for (int fn = 0; fn < basis.size(); ++fn) {
        const auto& d = basis.dofs()[fn];
        for (int le = 0; le < 3; ++le)
          for (int row = 0; row < 2; ++row)
            for (int mm = 0; mm <= cfg.k; ++mm) {
              const double v = edge_moment(m, 0, le, row, mm, basis, fn);
              const bool is_this = d.kind == StressDof::Kind::Edge && d.local_edge == le &&
                                   d.row == row && d.moment == mm;
              CHECK(std::abs(v - (is_this ? 1.0 : 0.0)) < 1e-11);
            }
      }
    }
  }
}

TEST_CASE("RAFW trace reduction: degree-k edge moments vanish for all functions") {
  std::mt19937 rng(37);
  const Mesh2D m = random_triangle(rng);
  const FamilyConfig cfg{Family::RAFW, 2};
  const ElementStressBasis basis(m, 0, cfg);
  for (int fn = 0; fn < basis.size(); ++fn)
    for (int le = 0; le < 3; ++le)
      for (int row = 0; row < 2; ++row)
        CHECK(std::abs(edge_moment(m, 0, le, row, cfg.k, basis, fn)) < 1e-11);
}

TEST_CASE("Green's identity ties values, divergences and traces together") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (const FamilyConfig cfg :
       {FamilyConfig{Family::AFW, 2}, FamilyConfig{Family::SGG, 2}, FamilyConfig{Family::SGG, 3},
        FamilyConfig{Family::RAFW, 2}}) {
    const Mesh2D m = random_triangle(rng);
    const ElementStressBasis basis(m, 0, cfg);
    const auto geo = basis.geometry();
    const auto& vbasis = RefScalarBasis::get(cfg.k);
    // 20 random P_k test vectors v: int_K div(tau).v + int_K tau : grad v
    //                              = sum_E int_E (tau n_out).v
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> cx(vbasis.size()), cy(vbasis.size());
      for (auto& c : cx) c = uni(rng);
      for (auto& c : cy) c = uni(rng);
      auto v_at = [&](Vec2 p) {
        const Vec2 ref = to_reference(geo, p);
        Vec2 val;
        for (int i = 0; i < vbasis.size(); ++i) {
          const double phi = vbasis.value(i, ref);
          val += Vec2{cx[i] * phi, cy[i] * phi};
        }
        return val;
      };
      auto gradv_at = [&](Vec2 p) {
        const Vec2 ref = to_reference(geo, p);
        Mat2 g;
        for (int i = 0; i < vbasis.size(); ++i) {
          const Vec2 gr = vbasis.gradient(i, ref);
          // physical gradient: J^{-T} grad_ref
          const Vec2 gp = {geo.jac_inv(0, 0) * gr.x + geo.jac_inv(1, 0) * gr.y,
                           geo.jac_inv(0, 1) * gr.x + geo.jac_inv(1, 1) * gr.y};
          g += Mat2(cx[i] * gp.x, cx[i] * gp.y, cy[i] * gp.x, cy[i] * gp.y);
        }
        return g;
      };
      for (int fn = 0; fn < basis.size(); ++fn) {
        double lhs = 0.0;
        for_each_tri_point(geo.v[0], geo.v[1], geo.v[2], triangle_rule(2 * cfg.k + 6),
                           [&](Vec2 p, double w) {
                             lhs += w * (dot(basis.divergence(fn, p), v_at(p)) +
                                         ddot(basis.value(fn, p), gradv_at(p)));
                           });
        double rhs = 0.0;
        for (int le = 0; le < 3; ++le) {
          const Vec2 pa = geo.v[(le + 1) % 3], pb = geo.v[(le + 2) % 3];
          const double sign = dot(basis.edge_normal(le), geo.outward_normal[le]) > 0 ? 1.0 : -1.0;
          for (const auto& q : edge_rule(2 * cfg.k + 6).points) {
            const Vec2 p = pa + (pb - pa) * q.t;
            rhs += q.w * geo.edge_len[le] * sign * dot(basis.normal_trace(fn, le, p), v_at(p));
          }
        }
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
      }
    }
  }
}

TEST_CASE("SGG bubbles: divergence-free with vanishing normal traces") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const Mesh2D m = random_triangle(rng);
    for (const int k : {2, 3}) {
      const ElementStressBasis basis(m, 0, {Family::SGG, k});
      const auto geo = basis.geometry();
      for (int fn = 0; fn < basis.size(); ++fn) {
        if (basis.dofs()[fn].kind != StressDof::Kind::Bubble) continue;
        double max_norm = 0.0, max_div = 0.0, max_trace = 0.0;
        for_each_tri_point(geo.v[0], geo.v[1], geo.v[2], triangle_rule(8),
                           [&](Vec2 p, double) {
                             max_norm = std::max(max_norm, frob(basis.value(fn, p)));
                             max_div = std::max(max_div, norm(basis.divergence(fn, p)));
                           });
        for (int le = 0; le < 3; ++le) {
          const Vec2 pa = geo.v[(le + 1) % 3], pb = geo.v[(le + 2) % 3];
          for (const auto& q : edge_rule(10).points) {
            const Vec2 p = pa + (pb - pa) * q.t;
            max_trace = std::max(max_trace, norm(basis.normal_trace(fn, le, p)));
          }
        }
        CHECK(max_div * geo.h <= 1e-12 * max_norm);
        CHECK(max_trace <= 1e-12 * max_norm);
      }
    }
  }
}

TEST_CASE("SGG bubble block is independent from the polynomial block") {
  const Mesh2D m = single_triangle({0.2, -0.1}, {1.3, 0.2}, {0.4, 1.1});
  const ElementStressBasis basis(m, 0, {Family::SGG, 2});
  const auto geo = basis.geometry();
  const auto& rule = triangle_rule(10);
  // Stack evaluations of all 29 functions at quadrature points; rank must be 29.
  Eigen::MatrixXd stacked(4 * rule.points.size(), basis.size());
  int r = 0;
  for (const auto& q : rule.points) {
    const Vec2 p = geo.v[0] + (geo.v[1] - geo.v[0]) * q.x + (geo.v[2] - geo.v[0]) * q.y;
    for (int fn = 0; fn < basis.size(); ++fn) {
      const Mat2 v = basis.value(fn, p);
      for (int c = 0; c < 4; ++c) stacked(r + c, fn) = v.m[c];
    }
    r += 4;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  CHECK(qr.rank() == basis.size());
}

TEST_CASE("dof layout counts for the 2-triangle unit square") {
  const Mesh2D m = builtin_geometry("unit_square", 1);
  const DofLayout afw = build_dof_layout(m, {Family::AFW, 2});
  CHECK(afw.n_V == 12);  // 2 elems x 2 comps x dim P1
  CHECK(afw.n_R == 6);   // 2 elems x dim P1
  CHECK(afw.n_S == 5 * 2 * 3 + 2 * 6);
  CHECK(afw.n_total == afw.n_S + afw.n_R + afw.n_V);

  const DofLayout sgg = build_dof_layout(m, {Family::SGG, 2});
  CHECK(sgg.n_R == 12);  // 2 elems x dim P2

  const DofLayout rafw = build_dof_layout(m, {Family::RAFW, 2});
  CHECK(rafw.n_S == 5 * 2 * 2 + 2 * 6);
  // The trace reduction buys strictly fewer stress dofs at equal element count.
  CHECK(rafw.n_S < afw.n_S);

  // Refinement strictly increases all three totals.
  const Mesh2D fine = uniform_refine(m);
  const DofLayout afw2 = build_dof_layout(fine, {Family::AFW, 2});
  CHECK(afw2.n_S > afw.n_S);
  CHECK(afw2.n_R > afw.n_R);
  CHECK(afw2.n_V > afw.n_V);
}

TEST_CASE("family validation") {
  CHECK_THROWS_AS(FamilyConfig(Family::AFW, 1).validate(), ValidationError);
  CHECK_THROWS_AS(FamilyConfig(Family::RAFW, 3).validate(), ValidationError);
  CHECK_THROWS_AS(FamilyConfig(Family::SGG, 4).validate(), ValidationError);
  CHECK_NOTHROW(FamilyConfig(Family::SGG, 3).validate());
  CHECK(parse_family("sgg", 2).name() == "sgg2");
  CHECK_THROWS_AS(parse_family("cgg", 2), ValidationError);
}

TEST_CASE("edge L2 projection: constants, best linear fit, orthogonality") {
  const Mesh2D m = single_triangle({0, 0}, {1, 0}, {0, 1});
  int bottom = -1;
  for (int e = 0; e < m.num_edges(); ++e)
    if (m.edges[e].a == 0 && m.edges[e].b == 1) bottom = e;
  REQUIRE(bottom >= 0);

  // Constant g reproduced exactly for any degree.
  const auto pc = edge_l2_project(m, bottom, [](Vec2) { return Vec2{3.0, -2.0}; }, 2);
  for (double t : {0.1, 0.5, 0.9}) {
    CHECK(pc.eval(t).x == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(pc.eval(t).y == doctest::Approx(-2.0).epsilon(1e-13));
  }

  // g = (t^2, 0) on the unit edge [0,1]x{0}: best linear fit is t - 1/6.
  // Oracle: the 2x2 normal equations for basis {1, t}:
  //   [1   1/2][c0]   [1/3]
  //   [1/2 1/3][c1] = [1/4]  =>  c0 = -1/6, c1 = 1.
  const auto pl = edge_l2_project(m, bottom, [](Vec2 p) { return Vec2{p.x * p.x, 0.0}; }, 1);
  for (double t : {0.0, 0.3, 0.7, 1.0})
    CHECK(pl.eval(t).x == doctest::Approx(t - 1.0 / 6.0).epsilon(1e-12));

  // Orthogonality of the residual against all polynomials up to the degree.
  auto g = [](Vec2 p) { return Vec2{std::sin(3.0 * p.x), std::cos(2.0 * p.x)}; };
  const auto pg = edge_l2_project(m, bottom, g, 2);
  for (int mom = 0; mom <= 2; ++mom) {
    Vec2 acc;
    for (const auto& q : edge_rule(18).points) {
      const Vec2 p{q.t, 0.0};
      const Vec2 resid = g(p) - pg.eval(q.t);
      acc += resid * (q.w * legendre_orthonormal_01(mom, q.t));
    }
    CHECK(std::abs(acc.x) < 1e-12);
    CHECK(std::abs(acc.y) < 1e-12);
  }
}
