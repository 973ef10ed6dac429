// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/postprocess.hpp"

#include <cmath>

#include "weaksym/polynomial.hpp"
#include "weaksym/quadrature.hpp"

namespace weaksym {

LagrangeSpace build_lagrange_space(const Mesh2D& mesh, int degree) {
  if (degree < 1) throw ValidationError("build_lagrange_space: degree must be >= 1");
  LagrangeSpace sp;
  sp.degree = degree;
  const int per_edge = degree - 1;
  const int per_elem_interior = (degree - 1) * (degree - 2) / 2;
  const int nv = mesh.num_vertices();
  const int edge_base = nv;
  const int interior_base = nv + mesh.num_edges() * per_edge;
  sp.n_nodes = interior_base + mesh.num_triangles() * per_elem_interior;

  sp.node_pos.resize(sp.n_nodes);
  for (int v = 0; v < nv; ++v) sp.node_pos[v] = mesh.vertices[v];
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto eg = edge_geometry(mesh, e);
    for (int m = 0; m < per_edge; ++m) {
      const double t = static_cast<double>(m + 1) / degree;
      sp.node_pos[edge_base + e * per_edge + m] = eg.lo + (eg.hi - eg.lo) * t;
    }
  }

  const auto& lag = RefLagrangeBasis::get(degree);
  sp.nodes_per_elem = lag.size();
  sp.elem_nodes.assign(mesh.num_triangles() * lag.size(), -1);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    const ElementGeometry geo = element_geometry(mesh, t);
    int interior_count = 0;
    for (int n = 0; n < lag.size(); ++n) {
      const auto lat = lag.lattice(n);
      int global = -1;
      int zero_at = -1, top_at = -1, zeros = 0;
      for (int a = 0; a < 3; ++a) {
        if (lat[a] == 0) {
          ++zeros;
          zero_at = a;
        }
        if (lat[a] == degree) top_at = a;
      }
      if (top_at >= 0) {
        global = tr.v[top_at];
      } else if (zeros == 1) {
        // On the local edge opposite to vertex zero_at, parameterized from
        // v[(zero_at+1)%3] toward v[(zero_at+2)%3].
        const int a1 = tr.v[(zero_at + 1) % 3];
        const int e = mesh.tri_edges[t][zero_at];
        const double s = static_cast<double>(lat[(zero_at + 2) % 3]) / degree;
        const double tg = (mesh.edges[e].a == a1) ? s : 1.0 - s;
        const int m = static_cast<int>(std::lround(tg * degree)) - 1;
        global = edge_base + e * per_edge + m;
      } else {
        global = interior_base + t * per_elem_interior + interior_count++;
        sp.node_pos[global] = geo.v[0] + (geo.v[1] - geo.v[0]) * lag.node(n).x +
                              (geo.v[2] - geo.v[0]) * lag.node(n).y;
      }
      sp.elem_nodes[t * lag.size() + n] = global;
    }
  }

  sp.dirichlet_node.assign(sp.n_nodes, 0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edges[e];
    if (!ed.boundary() || ed.tag.kind != BoundaryTag::Kind::Dirichlet) continue;
    sp.dirichlet_node[ed.a] = 1;
    sp.dirichlet_node[ed.b] = 1;
    for (int m = 0; m < per_edge; ++m) sp.dirichlet_node[edge_base + e * per_edge + m] = 1;
  }
  return sp;
}

PostField local_postprocess(const Discretization& disc, const Material& material,
                            const MixedSolution& sol) {
  const Mesh2D& mesh = disc.mesh();
  const FamilyConfig& cfg = disc.config();
  const DofLayout& lay = disc.layout();
  const int lstar = cfg.postprocess_degree();
  const int nlow = pk_dim(cfg.displacement_degree());
  const auto& basis = RefScalarBasis::get(lstar);
  const int nstar = basis.size();
  const int nhigh = nstar - nlow;

  PostField field;
  field.lstar = lstar;
  field.nstar = nstar;
  field.u_star.resize(mesh.num_triangles() * 2 * nstar);

  const TriangleRule& rule = triangle_rule(cfg.quadrature_order());
  std::vector<Vec2> gref(nstar);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry geo = element_geometry(mesh, t);
    const double jac = 2.0 * geo.area;

    // Gradient Gram matrix over the full degree-l* basis and the right-hand
    // side (C sigma_h + rho_h, grad phi_i) for both components.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nstar, nstar);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nstar, 2);
    for (const auto& q : rule.points) {
      const Vec2 p = geo.v[0] + (geo.v[1] - geo.v[0]) * q.x + (geo.v[2] - geo.v[0]) * q.y;
      const double w = q.w * jac;
      basis.gradients({q.x, q.y}, gref.data());
      // physical gradients J^{-T} grad_ref
      for (int i = 0; i < nstar; ++i)
        gref[i] = {geo.jac_inv(0, 0) * gref[i].x + geo.jac_inv(1, 0) * gref[i].y,
                   geo.jac_inv(0, 1) * gref[i].x + geo.jac_inv(1, 1) * gref[i].y};
      for (int i = 0; i < nstar; ++i)
        for (int j = 0; j <= i; ++j) {
          const double v = w * dot(gref[i], gref[j]);
          gram(i, j) += v;
          if (i != j) gram(j, i) += v;
        }
      const Mat2 rhs_tensor =
          material.compliance(stress_at(disc, sol, t, p)) + rotation_at(disc, sol, t, p);
      for (int i = 0; i < nstar; ++i) {
        rhs(i, 0) += w * dot(rhs_tensor.row(0), gref[i]);
        rhs(i, 1) += w * dot(rhs_tensor.row(1), gref[i]);
      }
    }

    // Mean constraint: low-order coefficients are u_h's (shared orthonormal
    // basis), the gradient equation determines the complement.
    const int ubase = lay.n_S + lay.n_R;
    Eigen::MatrixXd clow(nlow, 2);
    for (int d = 0; d < 2; ++d)
      for (int j = 0; j < nlow; ++j) clow(j, d) = sol.u[lay.disp_dof(t, d, j) - ubase];

    const Eigen::MatrixXd ghh = gram.bottomRightCorner(nhigh, nhigh);
    const Eigen::MatrixXd ghl = gram.bottomLeftCorner(nhigh, nlow);
    const Eigen::MatrixXd rhs_high = rhs.bottomRows(nhigh) - ghl * clow;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(ghh);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("local_postprocess: singular local system (basis bug)");
    const Eigen::MatrixXd chigh = ldlt.solve(rhs_high);

    for (int d = 0; d < 2; ++d) {
      for (int j = 0; j < nlow; ++j) field.u_star[t * 2 * nstar + d * nstar + j] = clow(j, d);
      for (int j = 0; j < nhigh; ++j)
        field.u_star[t * 2 * nstar + d * nstar + nlow + j] = chigh(j, d);
    }
  }
  return field;
}

void oswald_average(const Discretization& disc, PostField& field) {
  const Mesh2D& mesh = disc.mesh();
  field.space = build_lagrange_space(mesh, field.lstar);
  const auto& lag = RefLagrangeBasis::get(field.lstar);
  const auto& basis = RefScalarBasis::get(field.lstar);

  std::vector<Vec2> sum(field.space.n_nodes);
  std::vector<int> count(field.space.n_nodes, 0);
  std::vector<double> phi(field.nstar);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int n = 0; n < lag.size(); ++n) {
      basis.values(lag.node(n), phi.data());
      Vec2 val;
      for (int j = 0; j < field.nstar; ++j) {
        val.x += field.star_coeff(t, 0, j) * phi[j];
        val.y += field.star_coeff(t, 1, j) * phi[j];
      }
      const int g = field.space.elem_nodes[t * lag.size() + n];
      sum[g] += val;
      count[g] += 1;
    }
  }
  field.u_avg.resize(field.space.n_nodes);
  for (int g = 0; g < field.space.n_nodes; ++g) {
    field.u_avg[g] = field.space.dirichlet_node[g] ? Vec2{0.0, 0.0}
                                                   : sum[g] / static_cast<double>(count[g]);
  }
}

Vec2 u_star_at(const Discretization& disc, const PostField& field, int t, Vec2 p) {
  const auto& basis = RefScalarBasis::get(field.lstar);
  const Vec2 ref = to_reference(element_geometry(disc.mesh(), t), p);
  Vec2 acc;
  for (int j = 0; j < field.nstar; ++j) {
    const double phi = basis.value(j, ref);
    acc.x += field.star_coeff(t, 0, j) * phi;
    acc.y += field.star_coeff(t, 1, j) * phi;
  }
  return acc;
}

Mat2 u_star_gradient_at(const Discretization& disc, const PostField& field, int t, Vec2 p) {
  const auto& basis = RefScalarBasis::get(field.lstar);
  const ElementGeometry geo = element_geometry(disc.mesh(), t);
  const Vec2 ref = to_reference(geo, p);
  Mat2 acc;
  for (int j = 0; j < field.nstar; ++j) {
    const Vec2 gr = basis.gradient(j, ref);
    const Vec2 gp = {geo.jac_inv(0, 0) * gr.x + geo.jac_inv(1, 0) * gr.y,
                     geo.jac_inv(0, 1) * gr.x + geo.jac_inv(1, 1) * gr.y};
    acc += Mat2(field.star_coeff(t, 0, j) * gp.x, field.star_coeff(t, 0, j) * gp.y,
                field.star_coeff(t, 1, j) * gp.x, field.star_coeff(t, 1, j) * gp.y);
  }
  return acc;
}

Vec2 u_avg_at(const Discretization& disc, const PostField& field, int t, Vec2 p) {
  const auto& lag = RefLagrangeBasis::get(field.lstar);
  const Vec2 ref = to_reference(element_geometry(disc.mesh(), t), p);
  Vec2 acc;
  for (int n = 0; n < lag.size(); ++n) {
    const double phi = lag.value(n, ref);
    acc += field.u_avg[field.space.elem_nodes[t * lag.size() + n]] * phi;
  }
  return acc;
}

Mat2 u_avg_gradient_at(const Discretization& disc, const PostField& field, int t, Vec2 p) {
  const auto& lag = RefLagrangeBasis::get(field.lstar);
  const ElementGeometry geo = element_geometry(disc.mesh(), t);
  const Vec2 ref = to_reference(geo, p);
  Mat2 acc;
  for (int n = 0; n < lag.size(); ++n) {
    const Vec2 gr = lag.gradient(n, ref);
    const Vec2 gp = {geo.jac_inv(0, 0) * gr.x + geo.jac_inv(1, 0) * gr.y,
                     geo.jac_inv(0, 1) * gr.x + geo.jac_inv(1, 1) * gr.y};
    const Vec2 v = field.u_avg[field.space.elem_nodes[t * lag.size() + n]];
    acc += Mat2(v.x * gp.x, v.x * gp.y, v.y * gp.x, v.y * gp.y);
  }
  return acc;
}

}  // namespace weaksym
