// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <functional>
#include <set>

#include "weaksym/estimators.hpp"

namespace weaksym {

/// Maximum marking strategy: mark K when indicator(K) >= factor * max
/// indicator. Input is the squared local indicators; the returned set is
/// never empty (all elements when every indicator vanishes).
std::set<int> mark_elements(const std::vector<double>& local2, double factor = 0.25);

struct StopRule {
  int max_dofs = 0;   // stop once n_S+n_R+n_V reaches this (0: unused)
  int max_iters = 0;  // cap on solve iterations (0: unused)
};

enum class RefineMode { Adaptive, Uniform };

struct TraceRow {
  int iter = 0;
  int n_elems = 0;
  int n_S = 0, n_R = 0, n_V = 0;
  double eta = 0.0, eta_inc = 0.0;
  double osc_f = 0.0, osc_g = 0.0;
  std::optional<ExactErrors> exact;
  double seconds = 0.0;
};

struct AdaptiveTrace {
  std::vector<TraceRow> rows;
  int total_dofs(int i) const { return rows[i].n_S + rows[i].n_R + rows[i].n_V; }
};

struct IterationState {
  int iter;
  const Discretization& disc;
  const MixedSolution& sol;
  const PostField& post;
  const EstimateReport& report;
  const std::set<int>* marked;  // null on the final iteration
};

/// SOLVE -> ESTIMATE -> MARK -> REFINE driver. The mesh evolves by
/// newest-vertex bisection of the marked set (or uniformly). `on_iteration`
/// (optional) observes each completed iteration.
AdaptiveTrace adaptive_solve_loop(Mesh2D mesh, const Material& material,
                                  const FamilyConfig& cfg, const ProblemData& problem,
                                  EstimatorKind estimator, StopRule stop,
                                  RefineMode mode = RefineMode::Adaptive,
                                  double mark_factor = 0.25,
                                  const std::function<void(const IterationState&)>& on_iteration = {});

}  // namespace weaksym
