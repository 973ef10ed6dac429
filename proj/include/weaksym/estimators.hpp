// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <optional>

#include "weaksym/postprocess.hpp"

namespace weaksym {

enum class EstimatorKind { Eta, EtaInc };

/// The factor in front of the skew term of the hypercircle estimator.
inline constexpr double kSkewFactor = 1.6180339887498949;  // (sqrt(5)+1)/2

struct ExactErrors {
  double e_C_sigma = 0.0;
  double e_C_u = 0.0;
  double e_mean = 0.0;
  double e_inc_sigma = 0.0;
  double e_inc_u = 0.0;
  /// Absolute (unnormalized) counterparts used by the guaranteed-bound check.
  double abs_C_sigma = 0.0, abs_C_u = 0.0, abs_mean = 0.0;
};

struct EstimateReport {
  /// Squared per-element indicator contributions (term-local parts combined
  /// with the same coefficients as the global estimators).
  std::vector<double> local_eta2, local_eta_inc2;
  /// Global squared term sums.
  double term2_grad_C = 0.0;   // ||sigma_h - A eps(u_avg)||_C^2
  double term2_skew_C = 0.0;   // ||sigma_h - sigma_h^T||_C^2
  double term2_graddev = 0.0;  // ||C sigma_h + rho_h - grad u_avg||_0^2
  double term2_skew0 = 0.0;    // ||sigma_h - sigma_h^T||_0^2
  double osc_f = 0.0, osc_g = 0.0;
  std::vector<double> local_osc2;  // per element h^2||f-Pf||^2 + h||g-Qg||^2 parts
  /// Absolute estimator values.
  double eta_raw = 0.0, eta_inc_raw = 0.0;
  /// Relative values (scaled by norm_C resp. mu^{-1/2} norm_0); equal to the
  /// raw values when the normalization constants are unknown (0).
  double eta = 0.0, eta_inc = 0.0;
  double norm_C = 0.0, norm_0 = 0.0;
  std::optional<ExactErrors> exact;

  const std::vector<double>& locals(EstimatorKind kind) const {
    return kind == EstimatorKind::Eta ? local_eta2 : local_eta_inc2;
  }
};

/// Data oscillation: osc(f)^2 = sum_K h_K^2 ||f - P_K f||_{0,K}^2 and
/// osc(g)^2 = sum_{E in Gamma_N} h_E ||g - Q_E g||_{0,E}^2 (constant C = 1).
struct OscillationReport {
  double osc_f = 0.0, osc_g = 0.0;
  std::vector<double> local2;  // per element, edge parts assigned to the owner
};
OscillationReport oscillation(const Discretization& disc, const ProblemData& problem);

/// Hypercircle estimator: eta_raw = 1/2 ||sigma_h - A eps(u_avg)||_C
///   + (sqrt(5)+1)/2 ||sigma_h - sigma_h^T||_C + osc(f) + osc(g).
EstimateReport hypercircle_estimate(const Discretization& disc, const Material& material,
                                    const MixedSolution& sol, const PostField& post,
                                    const ProblemData& problem);

/// Incompressibility-robust estimator: eta_inc_raw =
///   mu^{1/2} ||C sigma_h + rho_h - grad u_avg||_0
///   + mu^{-1/2} ||sigma_h - sigma_h^T||_0 + osc(f) + osc(g).
EstimateReport incompressible_estimate(const Discretization& disc, const Material& material,
                                       const MixedSolution& sol, const PostField& post,
                                       const ProblemData& problem);

/// Errors against the closed-form solution (requires problem.exact_*).
ExactErrors exact_errors(const Discretization& disc, const Material& material,
                         const MixedSolution& sol, const PostField& post,
                         const ProblemData& problem);

/// One-sweep combination of both estimators, oscillation and (when available)
/// the exact errors; what the adaptive loop records.
EstimateReport estimate_all(const Discretization& disc, const Material& material,
                            const MixedSolution& sol, const PostField& post,
                            const ProblemData& problem);

/// ||sigma_h||_C and ||sigma_h||_0 of a discrete stress (used to normalize
/// benchmark outputs when no exact solution exists).
std::pair<double, double> discrete_stress_norms(const Discretization& disc,
                                                const Material& material,
                                                const MixedSolution& sol);

}  // namespace weaksym
