// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/adaptivity.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace weaksym {

std::set<int> mark_elements(const std::vector<double>& local2, double factor) {
  if (local2.empty()) throw ValidationError("mark_elements: empty indicator set");
  double max2 = 0.0;
  for (double v : local2) max2 = std::max(max2, v);
  std::set<int> marked;
  if (max2 == 0.0) {
    std::fprintf(stderr, "weaksym: all error indicators are zero; marking every element\n");
    for (std::size_t t = 0; t < local2.size(); ++t) marked.insert(static_cast<int>(t));
    return marked;
  }
  const double threshold2 = factor * factor * max2;
  for (std::size_t t = 0; t < local2.size(); ++t)
    if (local2[t] >= threshold2) marked.insert(static_cast<int>(t));
  return marked;
}

AdaptiveTrace adaptive_solve_loop(Mesh2D mesh, const Material& material, const FamilyConfig& cfg,
                                  const ProblemData& problem, EstimatorKind estimator,
                                  StopRule stop, RefineMode mode, double mark_factor,
                                  const std::function<void(const IterationState&)>& on_iteration) {
  if (stop.max_dofs <= 0 && stop.max_iters <= 0)
    throw ValidationError("adaptive_solve_loop: stop criterion must be positive");
  cfg.validate();

  AdaptiveTrace trace;
  for (int iter = 0;; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    Discretization disc(mesh, cfg);
    MixedSolution sol;
    PostField post;
    EstimateReport report;
    try {
      const MixedSystem sys = assemble(disc, material, problem);
      sol = solve_saddle(sys);
      post = local_postprocess(disc, material, sol);
      oswald_average(disc, post);
      report = estimate_all(disc, material, sol, post, problem);
    } catch (const SolverError& err) {
      throw SolverError("iteration " + std::to_string(iter) + ": " + err.what());
    }

    TraceRow row;
    row.iter = iter;
    row.n_elems = mesh.num_triangles();
    row.n_S = disc.layout().n_S;
    row.n_R = disc.layout().n_R;
    row.n_V = disc.layout().n_V;
    row.eta = report.eta;
    row.eta_inc = report.eta_inc;
    row.osc_f = report.osc_f;
    row.osc_g = report.osc_g;
    row.exact = report.exact;
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.rows.push_back(row);

    const bool done = (stop.max_dofs > 0 && disc.layout().n_total >= stop.max_dofs) ||
                      (stop.max_iters > 0 && iter + 1 >= stop.max_iters);

    std::set<int> marked;
    if (!done && mode == RefineMode::Adaptive)
      marked = mark_elements(report.locals(estimator), mark_factor);
    if (on_iteration)
      on_iteration({iter, disc, sol, post, report, done ? nullptr : &marked});
    if (done) {
      trace.rows.back().seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return trace;
    }
    mesh = (mode == RefineMode::Uniform) ? uniform_refine(mesh) : bisect_refine(mesh, marked);
  }
}

}  // namespace weaksym
