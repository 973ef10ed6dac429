// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/stress_basis.hpp"

#include <cmath>

#include "weaksym/quadrature.hpp"

namespace weaksym {

namespace {

// Powers zeta^a * eta^b for all monomials of degree <= k.
void monomial_values(const std::vector<std::pair<int, int>>& exps, Vec2 z, double* out) {
  double px[9], py[9];
  px[0] = py[0] = 1.0;
  for (int i = 1; i < 9; ++i) {
    px[i] = px[i - 1] * z.x;
    py[i] = py[i - 1] * z.y;
  }
  for (std::size_t j = 0; j < exps.size(); ++j) out[j] = px[exps[j].first] * py[exps[j].second];
}

}  // namespace

ElementStressBasis::ElementStressBasis(const Mesh2D& mesh, int t, const FamilyConfig& cfg)
    : cfg_(cfg), geo_(element_geometry(mesh, t)) {
  const int k = cfg.k;
  npk_ = pk_dim(k);
  exps_ = monomial_exponents(k);
  const int n_vec = 2 * npk_;
  const int full_moments = k + 1;
  n_moments_ = cfg.edge_moment_degree() + 1;

  for (int le = 0; le < 3; ++le) {
    const int e = mesh.tri_edges[t][le];
    const EdgeGeometry eg = edge_geometry(mesh, e);
    edge_normal_[le] = eg.normal;
    edge_h_[le] = eg.length;
    edge_ends_[le] = {eg.lo, eg.hi};
  }

  // --- Vandermonde of the dual functionals over the vector monomials ---
  Eigen::MatrixXd vand = Eigen::MatrixXd::Zero(n_vec, n_vec);
  const EdgeRule& erule = edge_rule(2 * k + 2);
  std::vector<double> mono(npk_);

  int fn = 0;
  for (int le = 0; le < 3; ++le) {
    for (int m = 0; m < full_moments; ++m, ++fn) {
      for (const auto& q : erule.points) {
        const Vec2 p = edge_ends_[le][0] + (edge_ends_[le][1] - edge_ends_[le][0]) * q.t;
        const double leg =
            legendre_orthonormal_01(m, q.t) / std::sqrt(edge_h_[le]);
        const double w = q.w * edge_h_[le] * leg;
        monomial_values(exps_, scaled(p), mono.data());
        for (int j = 0; j < npk_; ++j) {
          vand(fn, j) += w * mono[j] * edge_normal_[le].x;
          vand(fn, npk_ + j) += w * mono[j] * edge_normal_[le].y;
        }
      }
    }
  }

  // Interior functionals: moments against grad(p), p of degree 1..k-1, and
  // against curl(b_K * phi), phi of degree <= k-2 (all in scaled coordinates).
  const auto grad_exps = monomial_exponents(std::max(k - 1, 0));
  const auto curl_exps = (k >= 2) ? monomial_exponents(k - 2) : std::vector<std::pair<int, int>>{};

  // Barycentric coordinates as affine polynomials in scaled coordinates.
  std::array<Poly2, 3> bary;
  for (int i = 0; i < 3; ++i) {
    const Vec2 a = geo_.v[(i + 1) % 3], b = geo_.v[(i + 2) % 3], c = geo_.v[i];
    // lambda_i is 1 at c, 0 on segment (a,b).
    const Vec2 d = b - a;
    const double denom = cross(d, c - a);
    // lambda_i(x) = cross(d, x - a)/denom; substitute x = centroid + h*zeta.
    const Vec2 grad = Vec2(-d.y, d.x) / denom;
    const double at_centroid = cross(d, geo_.centroid - a) / denom;
    bary[i] = Poly2::affine(at_centroid, grad.x * geo_.h, grad.y * geo_.h);
  }
  const Poly2 bubble_poly = bary[0] * bary[1] * bary[2];

  const TriangleRule& trule = triangle_rule(2 * k + 2);
  std::vector<Poly2> curl_x, curl_y;  // curl(b*phi) components in scaled coords
  for (const auto& [a, b] : curl_exps) {
    const Poly2 bp = bubble_poly * Poly2::monomial(a, b);
    curl_x.push_back(bp.dy());
    curl_y.push_back(bp.dx() * -1.0);
  }

  const int n_grad = static_cast<int>(grad_exps.size()) - 1;  // skip the constant
  const int n_curl = static_cast<int>(curl_exps.size());
  if (3 * full_moments + n_grad + n_curl != n_vec)
    throw ValidationError("stress basis: functional count mismatch");

  for_each_tri_point(geo_.v[0], geo_.v[1], geo_.v[2], trule, [&](Vec2 p, double w) {
    const Vec2 z = scaled(p);
    monomial_values(exps_, z, mono.data());
    const double wi = w / geo_.area;
    for (int g = 0; g < n_grad; ++g) {
      const auto [a, b] = grad_exps[g + 1];
      const double gx = a > 0 ? a * std::pow(z.x, a - 1) * std::pow(z.y, b) : 0.0;
      const double gy = b > 0 ? b * std::pow(z.x, a) * std::pow(z.y, b - 1) : 0.0;
      for (int j = 0; j < npk_; ++j) {
        vand(fn + g, j) += wi * mono[j] * gx;
        vand(fn + g, npk_ + j) += wi * mono[j] * gy;
      }
    }
    for (int cidx = 0; cidx < n_curl; ++cidx) {
      const double cx = curl_x[cidx].eval(z), cy = curl_y[cidx].eval(z);
      for (int j = 0; j < npk_; ++j) {
        vand(fn + n_grad + cidx, j) += 27.0 * wi * mono[j] * cx;
        vand(fn + n_grad + cidx, npk_ + j) += 27.0 * wi * mono[j] * cy;
      }
    }
  });

  Eigen::FullPivLU<Eigen::MatrixXd> lu(vand);
  if (!lu.isInvertible())
    throw ValidationError("stress basis: singular Vandermonde (unisolvence bug)");
  coef_ = lu.inverse();
  condition_ = vand.cwiseAbs().colwise().sum().maxCoeff() *
               coef_.cwiseAbs().colwise().sum().maxCoeff();

  // --- element dof list ---
  // Edge dofs first (only the kept moments for RAFW), then interior dual
  // functions, then bubbles.
  for (int le = 0; le < 3; ++le)
    for (int row = 0; row < 2; ++row)
      for (int m = 0; m < n_moments_; ++m) {
        StressDof d;
        d.kind = StressDof::Kind::Edge;
        d.local_edge = le;
        d.row = row;
        d.moment = m;
        dofs_.push_back(d);
        pmap_.emplace_back(row, le * full_moments + m);
      }
  int ordinal = 0;
  for (int row = 0; row < 2; ++row)
    for (int q = 0; q < n_grad + n_curl; ++q) {
      StressDof d;
      d.kind = StressDof::Kind::Interior;
      d.ordinal = ordinal++;
      dofs_.push_back(d);
      pmap_.emplace_back(row, 3 * full_moments + q);
    }

  if (cfg.has_bubbles()) {
    // Bubble generators: q of exact degree k only. Lower-degree q produce
    // curl(grad(q) b_K) of degree <= k, already contained in [P_k]^{2x2};
    // restricting to the homogeneous part makes the sum direct.
    const auto q_exps = monomial_exponents(k);
    const TriangleRule& nrule = triangle_rule(2 * k + 4);
    for (std::size_t qi = 1; qi < q_exps.size(); ++qi) {
      if (q_exps[qi].first + q_exps[qi].second != k) continue;
      const Poly2 q = Poly2::monomial(q_exps[qi].first, q_exps[qi].second);
      const Poly2 wx = q.dx(), wy = q.dy();
      Bubble bub;
      const Poly2 gx = wx * bubble_poly, gy = wy * bubble_poly;
      bub.rows[0] = {gx.dy(), gx.dx() * -1.0};
      bub.rows[1] = {gy.dy(), gy.dx() * -1.0};
      bub.div[0] = bub.rows[0][0].dx() + bub.rows[0][1].dy();
      bub.div[1] = bub.rows[1][0].dx() + bub.rows[1][1].dy();
      // Normalize to unit L2 norm on the element.
      double nrm2 = 0.0;
      const double h2 = geo_.h * geo_.h;
      for_each_tri_point(geo_.v[0], geo_.v[1], geo_.v[2], nrule, [&](Vec2 p, double w) {
        const Vec2 z = scaled(p);
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) {
            const double v = bub.rows[r][c].eval(z) / h2;
            nrm2 += w * v * v;
          }
      });
      bub.scale = 1.0 / (h2 * std::sqrt(nrm2));
      bubbles_.push_back(std::move(bub));

      StressDof d;
      d.kind = StressDof::Kind::Bubble;
      d.ordinal = ordinal++;
      dofs_.push_back(d);
      pmap_.emplace_back(-1, static_cast<int>(bubbles_.size()) - 1);
    }
  }
  n_interior_ = ordinal;
}

Vec2 ElementStressBasis::vec_value(int col, Vec2 zeta) const {
  double mono[45];
  monomial_values(exps_, zeta, mono);
  Vec2 v;
  for (int j = 0; j < npk_; ++j) {
    v.x += coef_(j, col) * mono[j];
    v.y += coef_(npk_ + j, col) * mono[j];
  }
  return v;
}

double ElementStressBasis::vec_div_scaled(int col, Vec2 zeta) const {
  double acc = 0.0;
  for (int j = 0; j < npk_; ++j) {
    const auto [a, b] = exps_[j];
    if (a > 0) acc += coef_(j, col) * a * std::pow(zeta.x, a - 1) * std::pow(zeta.y, b);
    if (b > 0) acc += coef_(npk_ + j, col) * b * std::pow(zeta.x, a) * std::pow(zeta.y, b - 1);
  }
  return acc;
}

Mat2 ElementStressBasis::value(int i, Vec2 p) const {
  const auto [row, idx] = pmap_[i];
  const Vec2 z = scaled(p);
  if (row >= 0) return Mat2::single_row(row, vec_value(idx, z));
  const Bubble& b = bubbles_[idx];
  return Mat2(b.rows[0][0].eval(z), b.rows[0][1].eval(z), b.rows[1][0].eval(z),
              b.rows[1][1].eval(z)) *
         b.scale;
}

Vec2 ElementStressBasis::divergence(int i, Vec2 p) const {
  const auto [row, idx] = pmap_[i];
  const Vec2 z = scaled(p);
  if (row >= 0) {
    const double d = vec_div_scaled(idx, z) / geo_.h;
    return row == 0 ? Vec2{d, 0.0} : Vec2{0.0, d};
  }
  const Bubble& b = bubbles_[idx];
  const double s = b.scale / geo_.h;
  return {s * b.div[0].eval(z), s * b.div[1].eval(z)};
}

Vec2 ElementStressBasis::normal_trace(int i, int local_edge, Vec2 p) const {
  return value(i, p).apply(edge_normal_[local_edge]);
}

void ElementStressBasis::eval_all(Vec2 p, Mat2* out) const {
  const Vec2 z = scaled(p);
  double mono[45];
  monomial_values(exps_, z, mono);
  for (int i = 0; i < size(); ++i) {
    const auto [row, idx] = pmap_[i];
    if (row >= 0) {
      Vec2 v;
      for (int j = 0; j < npk_; ++j) {
        v.x += coef_(j, idx) * mono[j];
        v.y += coef_(npk_ + j, idx) * mono[j];
      }
      out[i] = Mat2::single_row(row, v);
    } else {
      const Bubble& b = bubbles_[idx];
      out[i] = Mat2(b.rows[0][0].eval(z), b.rows[0][1].eval(z), b.rows[1][0].eval(z),
                    b.rows[1][1].eval(z)) *
               b.scale;
    }
  }
}

void ElementStressBasis::eval_all_div(Vec2 p, Vec2* out) const {
  for (int i = 0; i < size(); ++i) out[i] = divergence(i, p);
}

}  // namespace weaksym
