// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/assembly.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <ostream>

#include "weaksym/polynomial.hpp"
#include "weaksym/quadrature.hpp"
#include "field_eval.hpp"

namespace weaksym {

namespace {

// Rigid-body modes spanning the kernel of the strain operator.
Vec2 rigid_mode(int j, Vec2 p) {
  switch (j) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, 1.0};
    default:
      return {-p.y, p.x};
  }
}

std::vector<double> tabulate(const RefScalarBasis& basis, const TriangleRule& rule) {
  std::vector<double> tab(rule.points.size() * basis.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    basis.values({rule.points[q].x, rule.points[q].y}, tab.data() + q * basis.size());
  return tab;
}

}  // namespace

MixedSystem assemble(const Discretization& disc, const Material& material,
                     const ProblemData& problem) {
  const Mesh2D& mesh = disc.mesh();
  const DofLayout& lay = disc.layout();
  const FamilyConfig& cfg = disc.config();

  MixedSystem sys;
  sys.disc = &disc;
  sys.pinned.assign(lay.n_total, 0.0);
  std::vector<char> is_pinned(lay.n_total, 0);

  // Essential Neumann data: pin edge moments to the moments of Q_E g.
  bool any_dirichlet = false;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edges[e];
    if (!ed.boundary()) continue;
    if (ed.tag.kind == BoundaryTag::Kind::Dirichlet) {
      any_dirichlet = true;
      continue;
    }
    const auto it = problem.tractions.find(ed.tag.label);
    if (it == problem.tractions.end())
      throw ValidationError("assemble: no traction data for Neumann label '" + ed.tag.label + "'");
    const Vec2 n_out = edge_geometry(mesh, e).normal;
    const VectorField g = [&fn = it->second, n_out](Vec2 p) { return fn(p, n_out); };
    const EdgeProjection proj =
        edge_l2_project(mesh, e, g, cfg.edge_moment_degree(), problem.singular_point);
    for (int row = 0; row < 2; ++row)
      for (int m = 0; m < lay.edge_moments; ++m) {
        const int g = lay.stress_edge_dof(e, row, m);
        sys.pinned[g] = proj.coeff[m][row];
        is_pinned[g] = 1;
      }
  }
  const bool pure_traction = !any_dirichlet;
  if (pure_traction) {
    // Gauge fixing: pin the mean coefficients of u_x, u_y and rho on one
    // element (values zero). This removes the 3-dimensional rigid-body kernel
    // while keeping the matrix free of dense rows; since compatible loads make
    // the dropped equations hold automatically, the solution solves the full
    // system and is afterwards shifted to satisfy the mean constraints
    // int_Omega u . r_j = 0 exactly (see solve_saddle). The largest element
    // takes the gauge so that any residual data defect, which lands on the
    // dropped equations, is not amplified by 1/sqrt(|K|).
    int gauge = 0;
    double best_area = -1.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const double a = mesh.area(t);
      if (a > best_area) {
        best_area = a;
        gauge = t;
      }
    }
    is_pinned[lay.rot_dof(gauge, 0)] = 1;
    is_pinned[lay.disp_dof(gauge, 0, 0)] = 1;
    is_pinned[lay.disp_dof(gauge, 1, 0)] = 1;
  }

  sys.reduced_index.assign(lay.n_total, -1);
  int counter = 0;
  for (int g = 0; g < lay.n_total; ++g)
    if (!is_pinned[g]) sys.reduced_index[g] = counter++;
  sys.n_reduced = counter;
  sys.pure_traction = pure_traction;
  const int n = sys.n_reduced;

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;

  const TriangleRule& rule = triangle_rule(cfg.quadrature_order());
  const std::size_t npts = rule.points.size();
  const auto& rot_basis = RefScalarBasis::get(cfg.rotation_degree());
  const auto& disp_basis = RefScalarBasis::get(cfg.displacement_degree());
  const int nrot = rot_basis.size();
  const int ndisp = disp_basis.size();
  const std::vector<double> rot_tab = tabulate(rot_basis, rule);
  const std::vector<double> disp_tab = tabulate(disp_basis, rule);

  auto add_entry = [&](int gi, int gj, double v) {
    const int ri = sys.reduced_index[gi];
    if (ri < 0) return;
    const int rj = sys.reduced_index[gj];
    if (rj < 0)
      rhs[ri] -= v * sys.pinned[gj];
    else
      trips.emplace_back(ri, rj, v);
  };

  std::array<double, 3> rigid_defect{0.0, 0.0, 0.0};
  double rigid_scale = 0.0;

  std::vector<Mat2> tau;
  std::vector<Vec2> dtau;
  std::vector<double> amat, bdiv, brot, fvec;
  std::vector<int> gidx;

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementStressBasis& basis = disc.stress_basis(t);
    const ElementGeometry& geo = basis.geometry();
    const int ns = basis.size();

    gidx.resize(ns);
    for (int i = 0; i < ns; ++i) gidx[i] = lay.stress_dof(mesh, t, basis.dofs()[i]);

    tau.resize(ns);
    dtau.resize(ns);
    amat.assign(ns * ns, 0.0);
    bdiv.assign(2 * ndisp * ns, 0.0);
    brot.assign(nrot * ns, 0.0);
    fvec.assign(2 * ndisp, 0.0);

    const double jac = 2.0 * geo.area;
    for (std::size_t q = 0; q < npts; ++q) {
      const auto& qp = rule.points[q];
      const Vec2 p = geo.v[0] + (geo.v[1] - geo.v[0]) * qp.x + (geo.v[2] - geo.v[0]) * qp.y;
      const double w = qp.w * jac;
      basis.eval_all(p, tau.data());
      basis.eval_all_div(p, dtau.data());
      const double* rphi = rot_tab.data() + q * nrot;
      const double* dphi = disp_tab.data() + q * ndisp;

      for (int i = 0; i < ns; ++i) {
        const Mat2 ct = material.compliance(tau[i]);
        for (int j = 0; j <= i; ++j) amat[i * ns + j] += w * ddot(ct, tau[j]);
      }
      for (int i = 0; i < ns; ++i) {
        const double skew_i = tau[i].m[1] - tau[i].m[2];
        for (int j = 0; j < nrot; ++j) brot[j * ns + i] += w * rphi[j] * skew_i;
        for (int j = 0; j < ndisp; ++j) {
          bdiv[(0 * ndisp + j) * ns + i] += w * dphi[j] * dtau[i].x;
          bdiv[(1 * ndisp + j) * ns + i] += w * dphi[j] * dtau[i].y;
        }
      }
      const Vec2 f = problem.body_load(p);
      for (int j = 0; j < ndisp; ++j) {
        fvec[0 * ndisp + j] -= w * dphi[j] * f.x;
        fvec[1 * ndisp + j] -= w * dphi[j] * f.y;
      }
      if (pure_traction) {
        for (int rj = 0; rj < 3; ++rj) {
          const double fr = w * dot(f, rigid_mode(rj, p));
          rigid_defect[rj] += fr;
          rigid_scale += std::abs(fr);
        }
      }
    }

    for (int i = 0; i < ns; ++i)
      for (int j = 0; j <= i; ++j) {
        const double v = amat[i * ns + j];
        add_entry(gidx[i], gidx[j], v);
        if (j != i) add_entry(gidx[j], gidx[i], v);
      }
    for (int j = 0; j < nrot; ++j) {
      const int gr = lay.rot_dof(t, j);
      for (int i = 0; i < ns; ++i) {
        const double v = brot[j * ns + i];
        add_entry(gr, gidx[i], v);
        add_entry(gidx[i], gr, v);
      }
    }
    for (int d = 0; d < 2; ++d)
      for (int j = 0; j < ndisp; ++j) {
        const int gu = lay.disp_dof(t, d, j);
        for (int i = 0; i < ns; ++i) {
          const double v = bdiv[(d * ndisp + j) * ns + i];
          add_entry(gu, gidx[i], v);
          add_entry(gidx[i], gu, v);
        }
        if (sys.reduced_index[gu] >= 0) rhs[sys.reduced_index[gu]] += fvec[d * ndisp + j];
      }
  }

  // Pure-traction compatibility data: the boundary part uses the pinned
  // projected tractions g_h, integrated exactly (both are polynomials).
  if (pure_traction) {
    const EdgeRule& erule = edge_rule(cfg.k + 4);
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const auto& ed = mesh.edges[e];
      if (!ed.boundary() || ed.tag.kind != BoundaryTag::Kind::Neumann) continue;
      const EdgeGeometry eg = edge_geometry(mesh, e);
      const double s = 1.0 / std::sqrt(eg.length);
      for (const auto& q : erule.points) {
        const Vec2 p = eg.lo + (eg.hi - eg.lo) * q.t;
        Vec2 gh;
        for (int m = 0; m < lay.edge_moments; ++m) {
          const double leg = legendre_orthonormal_01(m, q.t) * s;
          gh.x += sys.pinned[lay.stress_edge_dof(e, 0, m)] * leg;
          gh.y += sys.pinned[lay.stress_edge_dof(e, 1, m)] * leg;
        }
        for (int rj = 0; rj < 3; ++rj) {
          const double v = q.w * eg.length * dot(gh, rigid_mode(rj, p));
          rigid_defect[rj] += v;
          rigid_scale += std::abs(v);
        }
      }
    }
  }
  sys.rigid_defect = rigid_defect;
  sys.rigid_scale = rigid_scale;

  sys.mat.resize(n, n);
  sys.mat.setFromTriplets(trips.begin(), trips.end());
  sys.mat.makeCompressed();
  sys.rhs = std::move(rhs);
  return sys;
}

MixedSolution solve_saddle(const MixedSystem& sys) {
  const Discretization& disc = *sys.disc;
  const DofLayout& lay = disc.layout();
  if (sys.pure_traction) {
    for (int j = 0; j < 3; ++j)
      if (std::abs(sys.rigid_defect[j]) > 1e-8 * std::max(sys.rigid_scale, 1e-30))
        throw SolverError("solve_saddle: incompatible pure-traction load (rigid-body defect " +
                          std::to_string(sys.rigid_defect[j]) + ")");
  }

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(sys.mat);
  lu.factorize(sys.mat);
  if (lu.info() != Eigen::Success)
    throw SolverError(
        "solve_saddle: singular factorization (suspected cause: missing rigid-body "
        "gauge on a pure-traction problem, otherwise a dof layout bug)");

  Eigen::VectorXd x = lu.solve(sys.rhs);
  const double bnorm = std::max(sys.rhs.norm(), 1e-300);
  double resid = (sys.mat * x - sys.rhs).norm() / bnorm;
  // Iterative refinement to (near) machine precision: small elements divide
  // the row residuals by sqrt(|K|), so the elementwise equilibrium identity
  // needs more than the bare factorization accuracy.
  for (int step = 0; step < 4 && resid > 1e-15; ++step) {
    const Eigen::VectorXd dx = lu.solve(sys.rhs - sys.mat * x);
    const Eigen::VectorXd xn = x + dx;
    const double rn = (sys.mat * xn - sys.rhs).norm() / bnorm;
    if (rn >= resid) break;
    x = xn;
    resid = rn;
  }
  if (resid > 1e-10)
    throw SolverError("solve_saddle: relative residual " + std::to_string(resid) +
                      " exceeds 1e-10");

  MixedSolution sol;
  sol.cfg = disc.config();
  sol.algebraic_residual = resid;
  sol.sigma.resize(lay.n_S);
  for (int g = 0; g < lay.n_S; ++g)
    sol.sigma[g] = sys.reduced_index[g] >= 0 ? x[sys.reduced_index[g]] : sys.pinned[g];
  sol.rho.resize(lay.n_R);
  for (int g = 0; g < lay.n_R; ++g) {
    const int gg = lay.n_S + g;
    sol.rho[g] = sys.reduced_index[gg] >= 0 ? x[sys.reduced_index[gg]] : sys.pinned[gg];
  }
  sol.u.resize(lay.n_V);
  for (int g = 0; g < lay.n_V; ++g) {
    const int gg = lay.n_S + lay.n_R + g;
    sol.u[g] = sys.reduced_index[gg] >= 0 ? x[sys.reduced_index[gg]] : sys.pinned[gg];
  }

  if (sys.pure_traction) {
    // Shift by the discrete rigid-body mode so that int_Omega u . r_j = 0.
    // The shift is a kernel vector of the assembled operator (u part P_h r,
    // rho part omega(r)), so all equations remain satisfied.
    const Mesh2D& mesh = disc.mesh();
    const auto& disp_basis = RefScalarBasis::get(disc.config().displacement_degree());
    const TriangleRule& rule = triangle_rule(4);
    Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
    Eigen::Vector3d moments = Eigen::Vector3d::Zero();
    const int ubase = lay.n_S + lay.n_R;
    std::vector<double> phi(disp_basis.size());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const ElementGeometry geo = element_geometry(mesh, t);
      const double jac = 2.0 * geo.area;
      for (const auto& q : rule.points) {
        const Vec2 p = geo.v[0] + (geo.v[1] - geo.v[0]) * q.x + (geo.v[2] - geo.v[0]) * q.y;
        const double w = q.w * jac;
        disp_basis.values({q.x, q.y}, phi.data());
        Vec2 uh;
        for (int j = 0; j < disp_basis.size(); ++j) {
          uh.x += sol.u[lay.disp_dof(t, 0, j) - ubase] * phi[j];
          uh.y += sol.u[lay.disp_dof(t, 1, j) - ubase] * phi[j];
        }
        for (int a = 0; a < 3; ++a) {
          const Vec2 ra = rigid_mode(a, p);
          moments[a] += w * dot(uh, ra);
          for (int b = 0; b < 3; ++b) gram(a, b) += w * dot(ra, rigid_mode(b, p));
        }
      }
    }
    const Eigen::Vector3d c = gram.ldlt().solve(moments);
    sol.rigid_correction = {c[0], c[1], c[2]};
    // u -= P_h(c . r): the modes are linear, hence exactly representable.
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const ElementGeometry geo = element_geometry(mesh, t);
      const double jac = 2.0 * geo.area;
      std::vector<double> cx(disp_basis.size(), 0.0), cy(disp_basis.size(), 0.0);
      for (const auto& q : rule.points) {
        const Vec2 p = geo.v[0] + (geo.v[1] - geo.v[0]) * q.x + (geo.v[2] - geo.v[0]) * q.y;
        const double w = q.w * jac;
        disp_basis.values({q.x, q.y}, phi.data());
        const Vec2 r{c[0] - c[2] * p.y, c[1] + c[2] * p.x};
        for (int j = 0; j < disp_basis.size(); ++j) {
          cx[j] += w * phi[j] * r.x;
          cy[j] += w * phi[j] * r.y;
        }
      }
      for (int j = 0; j < disp_basis.size(); ++j) {
        sol.u[lay.disp_dof(t, 0, j) - ubase] -= cx[j] / jac;
        sol.u[lay.disp_dof(t, 1, j) - ubase] -= cy[j] / jac;
      }
    }
    // rho -= omega(c . r): the rotation mode contributes the constant
    // skew gradient -c2 * J, i.e. -c2/sqrt(2) on the orthonormal constant.
    for (int t = 0; t < mesh.num_triangles(); ++t)
      sol.rho[lay.rot_dof(t, 0) - lay.n_S] -= -c[2] / std::sqrt(2.0);
  }
  return sol;
}

Mat2 stress_at(const Discretization& disc, const MixedSolution& sol, int t, Vec2 p) {
  const ElementStressBasis& basis = disc.stress_basis(t);
  const DofLayout& lay = disc.layout();
  Mat2 acc;
  std::array<Mat2, 64> tau;
  basis.eval_all(p, tau.data());
  for (int i = 0; i < basis.size(); ++i)
    acc += tau[i] * sol.sigma[lay.stress_dof(disc.mesh(), t, basis.dofs()[i])];
  return acc;
}

Vec2 stress_divergence_at(const Discretization& disc, const MixedSolution& sol, int t, Vec2 p) {
  const ElementStressBasis& basis = disc.stress_basis(t);
  const DofLayout& lay = disc.layout();
  Vec2 acc;
  for (int i = 0; i < basis.size(); ++i)
    acc += basis.divergence(i, p) * sol.sigma[lay.stress_dof(disc.mesh(), t, basis.dofs()[i])];
  return acc;
}

Mat2 rotation_at(const Discretization& disc, const MixedSolution& sol, int t, Vec2 p) {
  const auto& rot_basis = RefScalarBasis::get(disc.config().rotation_degree());
  const DofLayout& lay = disc.layout();
  const Vec2 ref = to_reference(element_geometry(disc.mesh(), t), p);
  double q = 0.0;
  for (int j = 0; j < rot_basis.size(); ++j)
    q += sol.rho[lay.rot_dof(t, j) - lay.n_S] * rot_basis.value(j, ref);
  return skew_from_scalar(q);
}

Vec2 displacement_at(const Discretization& disc, const MixedSolution& sol, int t, Vec2 p) {
  const auto& disp_basis = RefScalarBasis::get(disc.config().displacement_degree());
  const DofLayout& lay = disc.layout();
  const Vec2 ref = to_reference(element_geometry(disc.mesh(), t), p);
  Vec2 acc;
  const int base = lay.n_S + lay.n_R;
  for (int j = 0; j < disp_basis.size(); ++j) {
    const double phi = disp_basis.value(j, ref);
    acc.x += sol.u[lay.disp_dof(t, 0, j) - base] * phi;
    acc.y += sol.u[lay.disp_dof(t, 1, j) - base] * phi;
  }
  return acc;
}

std::vector<double> project_onto_element(const Discretization& disc, int t, int deg,
                                         const VectorField& f) {
  const auto& basis = RefScalarBasis::get(deg);
  const ElementGeometry geo = element_geometry(disc.mesh(), t);
  const TriangleRule& rule = triangle_rule(disc.config().quadrature_order());
  std::vector<double> coef(2 * basis.size(), 0.0);
  std::vector<double> phi(basis.size());
  const double jac = 2.0 * geo.area;
  for (const auto& q : rule.points) {
    const Vec2 p = geo.v[0] + (geo.v[1] - geo.v[0]) * q.x + (geo.v[2] - geo.v[0]) * q.y;
    basis.values({q.x, q.y}, phi.data());
    const Vec2 val = f(p);
    for (int j = 0; j < basis.size(); ++j) {
      coef[j] += q.w * jac * phi[j] * val.x;
      coef[basis.size() + j] += q.w * jac * phi[j] * val.y;
    }
  }
  // Reference-orthonormal functions have squared norm 2|K| on the element.
  for (auto& c : coef) c /= jac;
  return coef;
}

DiscreteIdentityReport verify_discrete_identities(const Discretization& disc,
                                                  const MixedSolution& sol,
                                                  const ProblemData& problem) {
  const Mesh2D& mesh = disc.mesh();
  const FamilyConfig& cfg = disc.config();
  const TriangleRule& rule = triangle_rule(cfg.quadrature_order());
  std::vector<Vec2> ref_pts;
  for (const auto& q : rule.points) ref_pts.push_back({q.x, q.y});
  const ScalarBasisTable disp_tab = tabulate_scalar_basis(cfg.displacement_degree(), ref_pts);
  const ScalarBasisTable rot_tab = tabulate_scalar_basis(cfg.rotation_degree(), ref_pts);

  DiscreteIdentityReport rep;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const detail::LocalFields lf = detail::gather_local_fields(disc, sol, nullptr, t);
    const double jac = 2.0 * lf.geo->area;
    const auto pf = project_onto_element(disc, t, cfg.displacement_degree(), problem.body_load);

    double eq2 = 0.0;
    std::vector<double> wsym(rot_tab.n, 0.0);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 p = lf.physical(ref_pts[q]);
      const double w = rule.points[q].w * jac;
      Vec2 pfv;
      for (int j = 0; j < disp_tab.n; ++j) {
        const double phi = disp_tab.val[q * disp_tab.n + j];
        pfv.x += pf[j] * phi;
        pfv.y += pf[disp_tab.n + j] * phi;
      }
      const Vec2 r = lf.sigma_div_at(p) + pfv;
      eq2 += w * dot(r, r);

      const Mat2 s = lf.sigma_at(p);
      const double skew = s.m[1] - s.m[2];
      for (int j = 0; j < rot_tab.n; ++j) wsym[j] += w * rot_tab.val[q * rot_tab.n + j] * skew;
    }
    rep.equilibrium_residual = std::max(rep.equilibrium_residual, std::sqrt(eq2));
    // ||q_j J||_0 = sqrt(2 * 2|K|) for the reference-orthonormal q_j.
    const double eta_norm = std::sqrt(2.0 * jac);
    for (int j = 0; j < rot_tab.n; ++j)
      rep.weak_symmetry_residual =
          std::max(rep.weak_symmetry_residual, std::abs(wsym[j]) / eta_norm);
  }
  return rep;
}

void dump_system(std::ostream& os, const MixedSystem& sys) {
  os.precision(17);
  for (int col = 0; col < sys.mat.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.mat, col); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace weaksym
