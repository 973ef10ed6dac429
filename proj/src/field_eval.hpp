// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.
//
// Internal helpers: per-element views of the discrete fields with the global
// indirections (dof lookups, nodal bases) resolved once per element.

#pragma once

#include "weaksym/assembly.hpp"
#include "weaksym/postprocess.hpp"

namespace weaksym::detail {

struct LocalFields {
  const ElementStressBasis* basis = nullptr;
  const ElementGeometry* geo = nullptr;
  std::vector<double> stress_coef;
  std::vector<double> rot_coef;    // modal coefficients, RefScalarBasis(rot_deg)
  std::vector<double> ua_x, ua_y;  // u_avg modal coefficients, RefScalarBasis(lstar)
  int rot_deg = 0;
  int lstar = 0;

  Vec2 physical(Vec2 ref) const {
    return geo->v[0] + (geo->v[1] - geo->v[0]) * ref.x + (geo->v[2] - geo->v[0]) * ref.y;
  }

  Mat2 sigma_at(Vec2 p) const {
    Mat2 buf[64];
    basis->eval_all(p, buf);
    Mat2 acc;
    for (std::size_t i = 0; i < stress_coef.size(); ++i) acc += buf[i] * stress_coef[i];
    return acc;
  }

  Vec2 sigma_div_at(Vec2 p) const {
    Vec2 acc;
    for (std::size_t i = 0; i < stress_coef.size(); ++i)
      acc += basis->divergence(static_cast<int>(i), p) * stress_coef[i];
    return acc;
  }

  Mat2 grad_phys(Vec2 gref, Vec2 coeff) const {
    const Vec2 gp = {geo->jac_inv(0, 0) * gref.x + geo->jac_inv(1, 0) * gref.y,
                     geo->jac_inv(0, 1) * gref.x + geo->jac_inv(1, 1) * gref.y};
    return {coeff.x * gp.x, coeff.x * gp.y, coeff.y * gp.x, coeff.y * gp.y};
  }

  double rot_scalar_ref(Vec2 ref) const {
    const auto& b = RefScalarBasis::get(rot_deg);
    double acc = 0.0;
    for (int j = 0; j < b.size(); ++j) acc += rot_coef[j] * b.value(j, ref);
    return acc;
  }

  Mat2 ua_grad_ref(Vec2 ref) const {
    const auto& b = RefScalarBasis::get(lstar);
    Mat2 acc;
    for (int j = 0; j < b.size(); ++j)
      acc += grad_phys(b.gradient(j, ref), {ua_x[j], ua_y[j]});
    return acc;
  }

  double rot_scalar_tab(const ScalarBasisTable& tab, std::size_t q) const {
    double acc = 0.0;
    for (int j = 0; j < tab.n; ++j) acc += rot_coef[j] * tab.val[q * tab.n + j];
    return acc;
  }

  Mat2 ua_grad_tab(const ScalarBasisTable& tab, std::size_t q) const {
    Mat2 acc;
    for (int j = 0; j < tab.n; ++j)
      acc += grad_phys(tab.grad[q * tab.n + j], {ua_x[j], ua_y[j]});
    return acc;
  }
};

inline LocalFields gather_local_fields(const Discretization& disc, const MixedSolution& sol,
                                       const PostField* post, int t) {
  LocalFields lf;
  lf.basis = &disc.stress_basis(t);
  lf.geo = &lf.basis->geometry();
  const DofLayout& lay = disc.layout();
  lf.stress_coef.resize(lf.basis->size());
  for (int i = 0; i < lf.basis->size(); ++i)
    lf.stress_coef[i] = sol.sigma[lay.stress_dof(disc.mesh(), t, lf.basis->dofs()[i])];
  lf.rot_deg = disc.config().rotation_degree();
  const int nrot = pk_dim(lf.rot_deg);
  lf.rot_coef.resize(nrot);
  for (int j = 0; j < nrot; ++j) lf.rot_coef[j] = sol.rho[lay.rot_dof(t, j) - lay.n_S];
  if (post != nullptr) {
    lf.lstar = post->lstar;
    const auto& lag = RefLagrangeBasis::get(post->lstar);
    lf.ua_x.assign(post->nstar, 0.0);
    lf.ua_y.assign(post->nstar, 0.0);
    for (int n = 0; n < lag.size(); ++n) {
      const Vec2 v = post->u_avg[post->space.elem_nodes[t * lag.size() + n]];
      for (int f = 0; f < post->nstar; ++f) {
        const double c = lag.modal_coef(n, f);
        lf.ua_x[f] += v.x * c;
        lf.ua_y[f] += v.y * c;
      }
    }
  }
  return lf;
}

}  // namespace weaksym::detail
