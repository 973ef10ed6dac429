// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "weaksym/adaptivity.hpp"
#include "weaksym/lshape_exact.hpp"

namespace weaksym {

/// One benchmark run: geometry, discretization, material, estimator choice,
/// marking factor and stop criterion. Round-trips through JSON.
struct CaseConfig {
  std::string name;  // derived from the fields when empty
  std::string geometry = "lshape";
  int resolution = 1;
  std::string family = "sgg";
  int k = 2;
  double E = 1.0;
  double nu = 0.3;
  std::string mode = "plane_strain";
  std::string estimator = "eta";
  double mark_factor = 0.25;
  int max_dofs = 200000;
  int max_iters = 0;
  std::string refine = "adaptive";
  std::string out_dir = "out";
  bool dump_mesh = false;
  bool dump_system = false;
  bool time_trace = false;

  std::string display_name() const;
  void validate() const;
  std::string to_json_text() const;
  static CaseConfig from_json_text(const std::string& text);
  static CaseConfig from_json_file(const std::string& path);

  bool operator==(const CaseConfig&) const = default;
};

/// Geometry + material + loads (+ closed-form fields for the L-shape).
struct BenchProblem {
  Mesh2D initial_mesh;
  Material material;
  ProblemData data;
};

BenchProblem make_case_problem(const CaseConfig& cfg);

struct RunResult {
  AdaptiveTrace trace;
  Mesh2D final_mesh;
  double norm_scale_C = 0.0;  // normalization applied to eta columns
  double wall_seconds = 0.0;
};

/// Executes the study and writes trace.csv, indicators_<iter>.csv,
/// mesh_final.msh2d, report.svg and summary.txt under cfg.out_dir.
RunResult run_case(const CaseConfig& cfg);

/// Least-squares slope of log(value) vs log(N) over the last half of the
/// iterations; entries with value <= 0 are skipped. Throws when fewer than 3
/// usable points remain.
double fit_slope_loglog(const std::vector<double>& n, const std::vector<double>& value);

struct TraceColumn {
  std::string name;
  std::vector<double> values;  // aligned with element counts
};

struct TraceSeries {
  std::string name;
  std::vector<double> n_elems;
  std::vector<TraceColumn> columns;
};

TraceSeries trace_series(const std::string& name, const AdaptiveTrace& trace);

/// Summary table (one slope line per column per trace) + SVG log-log plot.
void emit_report(const std::vector<TraceSeries>& traces, std::ostream& summary,
                 std::ostream& svg);

void write_trace_csv(std::ostream& os, const AdaptiveTrace& trace, bool time_trace);

}  // namespace weaksym
