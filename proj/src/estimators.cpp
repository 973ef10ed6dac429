// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/estimators.hpp"

#include <cmath>

#include "field_eval.hpp"
#include "weaksym/polynomial.hpp"
#include "weaksym/quadrature.hpp"

namespace weaksym {

namespace {

constexpr int kGradedTriOrder = 20;
constexpr int kGradedTriLevels = 24;

// Does element t touch the singular point at one of its vertices?
int singular_vertex(const ElementGeometry& geo, const std::optional<Vec2>& s) {
  if (!s) return -1;
  for (int i = 0; i < 3; ++i)
    if (norm(geo.v[i] - *s) < 1e-12 * std::max(1.0, geo.h)) return i;
  return -1;
}

// Quadrature over element t, graded toward a singular vertex when present.
template <typename Fn>
void integrate_element(const ElementGeometry& geo, const std::optional<Vec2>& singular,
                       int order, Fn&& fn) {
  const int sv = singular_vertex(geo, singular);
  if (sv < 0) {
    for_each_tri_point(geo.v[0], geo.v[1], geo.v[2], triangle_rule(order), fn);
  } else {
    for_each_graded_tri_point(geo.v[sv], geo.v[(sv + 1) % 3], geo.v[(sv + 2) % 3],
                              triangle_rule(kGradedTriOrder), kGradedTriLevels, fn);
  }
}

}  // namespace

OscillationReport oscillation(const Discretization& disc, const ProblemData& problem) {
  const Mesh2D& mesh = disc.mesh();
  const FamilyConfig& cfg = disc.config();
  OscillationReport rep;
  rep.local2.assign(mesh.num_triangles(), 0.0);

  const auto& basis = RefScalarBasis::get(cfg.displacement_degree());
  const TriangleRule& rule = triangle_rule(cfg.quadrature_order());
  std::vector<double> phi(basis.size());
  double osc2_f = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry geo = element_geometry(mesh, t);
    const auto pf = project_onto_element(disc, t, cfg.displacement_degree(), problem.body_load);
    double defect2 = 0.0;
    const double jac = 2.0 * geo.area;
    for (const auto& q : rule.points) {
      const Vec2 p = geo.v[0] + (geo.v[1] - geo.v[0]) * q.x + (geo.v[2] - geo.v[0]) * q.y;
      basis.values({q.x, q.y}, phi.data());
      Vec2 pfv;
      for (int j = 0; j < basis.size(); ++j) {
        pfv.x += pf[j] * phi[j];
        pfv.y += pf[basis.size() + j] * phi[j];
      }
      const Vec2 d = problem.body_load(p) - pfv;
      defect2 += q.w * jac * dot(d, d);
    }
    const double local = geo.h * geo.h * defect2;
    rep.local2[t] += local;
    osc2_f += local;
  }

  double osc2_g = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edges[e];
    if (!ed.boundary() || ed.tag.kind != BoundaryTag::Kind::Neumann) continue;
    const auto it = problem.tractions.find(ed.tag.label);
    if (it == problem.tractions.end())
      throw ValidationError("oscillation: no traction data for label '" + ed.tag.label + "'");
    const Vec2 n_out = edge_geometry(mesh, e).normal;
    const VectorField g = [&fn = it->second, n_out](Vec2 p) { return fn(p, n_out); };
    const EdgeProjection proj =
        edge_l2_project(mesh, e, g, cfg.edge_moment_degree(), problem.singular_point);
    const double defect2 = edge_projection_defect2(mesh, e, g, proj, problem.singular_point);
    const double local = proj.h * defect2;
    rep.local2[ed.tri[0]] += local;
    osc2_g += local;
  }
  rep.osc_f = std::sqrt(osc2_f);
  rep.osc_g = std::sqrt(osc2_g);
  return rep;
}

namespace {

// Shared sweep computing the squared term integrals of both estimators.
void accumulate_terms(const Discretization& disc, const Material& material,
                      const MixedSolution& sol, const PostField& post, EstimateReport& rep) {
  const Mesh2D& mesh = disc.mesh();
  const int n = mesh.num_triangles();
  rep.local_eta2.assign(n, 0.0);
  rep.local_eta_inc2.assign(n, 0.0);
  const TriangleRule& rule = triangle_rule(disc.config().quadrature_order());
  std::vector<Vec2> ref_pts;
  for (const auto& q : rule.points) ref_pts.push_back({q.x, q.y});
  const ScalarBasisTable rot_tab =
      tabulate_scalar_basis(disc.config().rotation_degree(), ref_pts);
  const ScalarBasisTable ua_tab = tabulate_scalar_basis(post.lstar, ref_pts);

  for (int t = 0; t < n; ++t) {
    const detail::LocalFields lf = detail::gather_local_fields(disc, sol, &post, t);
    const ElementGeometry& geo = *lf.geo;
    double grad_C = 0.0, skew_C = 0.0, graddev = 0.0, skew0 = 0.0;
    const double jac = 2.0 * geo.area;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 p = lf.physical(ref_pts[q]);
      const double w = rule.points[q].w * jac;
      const Mat2 sigma = lf.sigma_at(p);
      const Mat2 grad_ua = lf.ua_grad_tab(ua_tab, q);
      const Mat2 a_eps = material.elasticity(grad_ua.sym());
      const Mat2 diff = sigma - a_eps;
      grad_C += w * material.compliance_energy(diff);
      const Mat2 skew = sigma - sigma.transpose();
      skew_C += w * material.compliance_energy(skew);
      skew0 += w * ddot(skew, skew);
      const Mat2 dev = material.compliance(sigma) +
                       skew_from_scalar(lf.rot_scalar_tab(rot_tab, q)) - grad_ua;
      graddev += w * ddot(dev, dev);
    }
    rep.term2_grad_C += grad_C;
    rep.term2_skew_C += skew_C;
    rep.term2_graddev += graddev;
    rep.term2_skew0 += skew0;
    // Per-element localization: each squared term weighted like the global
    // estimator, plus the oscillation parts (added by the callers).
    rep.local_eta2[t] = 0.25 * grad_C + kSkewFactor * kSkewFactor * skew_C;
    rep.local_eta_inc2[t] =
        material.mu * graddev + skew0 / material.mu;
  }
}

void finalize(EstimateReport& rep, const Material& material, const OscillationReport& osc) {
  rep.osc_f = osc.osc_f;
  rep.osc_g = osc.osc_g;
  rep.local_osc2 = osc.local2;
  for (std::size_t t = 0; t < osc.local2.size(); ++t) {
    rep.local_eta2[t] += osc.local2[t];
    rep.local_eta_inc2[t] += osc.local2[t];
  }
  rep.eta_raw = 0.5 * std::sqrt(rep.term2_grad_C) + kSkewFactor * std::sqrt(rep.term2_skew_C) +
                rep.osc_f + rep.osc_g;
  rep.eta_inc_raw = std::sqrt(material.mu * rep.term2_graddev) +
                    std::sqrt(rep.term2_skew0 / material.mu) + rep.osc_f + rep.osc_g;
  rep.eta = rep.norm_C > 0.0 ? rep.eta_raw / rep.norm_C : rep.eta_raw;
  rep.eta_inc = rep.norm_0 > 0.0 ? rep.eta_inc_raw / (rep.norm_0 / std::sqrt(material.mu))
                                 : rep.eta_inc_raw;
}

}  // namespace

EstimateReport hypercircle_estimate(const Discretization& disc, const Material& material,
                                    const MixedSolution& sol, const PostField& post,
                                    const ProblemData& problem) {
  EstimateReport rep;
  rep.norm_C = problem.norm_C;
  rep.norm_0 = problem.norm_0;
  accumulate_terms(disc, material, sol, post, rep);
  finalize(rep, material, oscillation(disc, problem));
  return rep;
}

EstimateReport incompressible_estimate(const Discretization& disc, const Material& material,
                                       const MixedSolution& sol, const PostField& post,
                                       const ProblemData& problem) {
  // One sweep accumulates the terms of both estimators; the report carries
  // eta and eta_inc regardless of the entry point.
  return hypercircle_estimate(disc, material, sol, post, problem);
}

ExactErrors exact_errors(const Discretization& disc, const Material& material,
                         const MixedSolution& sol, const PostField& post,
                         const ProblemData& problem) {
  if (!problem.has_exact())
    throw ValidationError("exact_errors: problem has no closed-form solution");
  const Mesh2D& mesh = disc.mesh();
  const auto& sigma_ex = *problem.exact_stress;
  double eC_sigma2 = 0.0, eC_u2 = 0.0, e_mean2 = 0.0, e0_sigma2 = 0.0, einc_u2 = 0.0;
  const int order = disc.config().quadrature_order();
  const TriangleRule& rule = triangle_rule(order);
  std::vector<Vec2> ref_pts;
  for (const auto& q : rule.points) ref_pts.push_back({q.x, q.y});
  const ScalarBasisTable ua_tab = tabulate_scalar_basis(post.lstar, ref_pts);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const detail::LocalFields lf = detail::gather_local_fields(disc, sol, &post, t);
    const ElementGeometry& geo = *lf.geo;
    auto point_terms = [&](Vec2 p, double w, const Mat2& eps_avg) {
      const Mat2 sx = sigma_ex(p);
      const Mat2 sh = lf.sigma_at(p);
      const Mat2 a_eps = material.elasticity(eps_avg);
      eC_sigma2 += w * material.compliance_energy(sx - sh);
      eC_u2 += w * material.compliance_energy(sx - a_eps);
      e_mean2 += w * material.compliance_energy(sx - (sh + a_eps) * 0.5);
      const Mat2 d0 = sx - sh;
      e0_sigma2 += w * ddot(d0, d0);
      // eps(u) = C sigma for the exact pair; avoids differentiating u.
      const Mat2 deps = material.compliance(sx) - eps_avg;
      einc_u2 += w * ddot(deps, deps);
    };
    if (singular_vertex(geo, problem.singular_point) < 0) {
      const double jac = 2.0 * geo.area;
      for (std::size_t q = 0; q < rule.points.size(); ++q)
        point_terms(lf.physical(ref_pts[q]), rule.points[q].w * jac,
                    lf.ua_grad_tab(ua_tab, q).sym());
    } else {
      integrate_element(geo, problem.singular_point, order, [&](Vec2 p, double w) {
        point_terms(p, w, lf.ua_grad_ref(to_reference(geo, p)).sym());
      });
    }
  }
  ExactErrors err;
  err.abs_C_sigma = std::sqrt(eC_sigma2);
  err.abs_C_u = std::sqrt(eC_u2);
  err.abs_mean = std::sqrt(e_mean2);
  const double nC = problem.norm_C > 0 ? problem.norm_C : 1.0;
  const double n0 = problem.norm_0 > 0 ? problem.norm_0 : 1.0;
  err.e_C_sigma = err.abs_C_sigma / nC;
  err.e_C_u = err.abs_C_u / nC;
  err.e_mean = err.abs_mean / nC;
  err.e_inc_sigma = std::sqrt(e0_sigma2) / n0;
  err.e_inc_u = material.mu * std::sqrt(einc_u2) / n0;
  return err;
}

EstimateReport estimate_all(const Discretization& disc, const Material& material,
                            const MixedSolution& sol, const PostField& post,
                            const ProblemData& problem) {
  EstimateReport rep = hypercircle_estimate(disc, material, sol, post, problem);
  if (problem.has_exact()) rep.exact = exact_errors(disc, material, sol, post, problem);
  return rep;
}

std::pair<double, double> discrete_stress_norms(const Discretization& disc,
                                                const Material& material,
                                                const MixedSolution& sol) {
  double c2 = 0.0, z2 = 0.0;
  const TriangleRule& rule = triangle_rule(disc.config().quadrature_order());
  for (int t = 0; t < disc.mesh().num_triangles(); ++t) {
    const ElementGeometry geo = disc.stress_basis(t).geometry();
    for_each_tri_point(geo.v[0], geo.v[1], geo.v[2], rule, [&](Vec2 p, double w) {
      const Mat2 s = stress_at(disc, sol, t, p);
      c2 += w * material.compliance_energy(s);
      z2 += w * ddot(s, s);
    });
  }
  return {std::sqrt(c2), std::sqrt(z2)};
}

}  // namespace weaksym
