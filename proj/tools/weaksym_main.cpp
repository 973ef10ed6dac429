// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "weaksym/bench.hpp"

namespace {

int run_command(const weaksym::CaseConfig& cfg) {
  const weaksym::RunResult result = weaksym::run_case(cfg);
  const auto& rows = result.trace.rows;
  std::printf("case %s: %zu iterations, final N = %d, dofs = %d\n",
              cfg.display_name().c_str(), rows.size(), rows.back().n_elems,
              rows.back().n_S + rows.back().n_R + rows.back().n_V);
  std::printf("  eta = %.6g  eta_inc = %.6g", rows.back().eta, rows.back().eta_inc);
  if (rows.back().exact)
    std::printf("  e_C_sigma = %.6g  e_mean = %.6g", rows.back().exact->e_C_sigma,
                rows.back().exact->e_mean);
  std::printf("\n  outputs in %s (trace.csv, indicators_*.csv, mesh_final.msh2d, "
              "report.svg, summary.txt)\n",
              cfg.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weaksym: mixed finite elements for planar elasticity with weakly "
               "imposed stress symmetry and guaranteed a-posteriori error bounds"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "run a benchmark case (adaptive or uniform study)");
  std::string case_file;
  weaksym::CaseConfig cfg;
  run->add_option("--case", case_file, "JSON case file; flags override its values");
  auto* o_geometry = run->add_option("--geometry", cfg.geometry, "lshape | cook | unit_square");
  auto* o_resolution =
      run->add_option("--resolution", cfg.resolution, "coarse-mesh uniform refinements + 1");
  auto* o_family = run->add_option("--family", cfg.family, "afw | rafw | sgg");
  auto* o_k = run->add_option("--k", cfg.k, "polynomial degree index");
  auto* o_E = run->add_option("--E", cfg.E, "Young modulus");
  auto* o_nu = run->add_option("--nu", cfg.nu, "Poisson ratio");
  auto* o_mode = run->add_option("--mode", cfg.mode, "plane_strain | plane_stress");
  auto* o_est = run->add_option("--estimator", cfg.estimator, "eta | eta_inc (drives marking)");
  auto* o_mark =
      run->add_option("--mark-factor", cfg.mark_factor, "maximum-strategy threshold (0.25)");
  auto* o_maxdofs = run->add_option("--max-dofs", cfg.max_dofs, "stop once total dofs reach this");
  auto* o_maxiters = run->add_option("--max-iters", cfg.max_iters, "cap on iterations (0 = off)");
  auto* o_refine = run->add_option("--refine", cfg.refine, "adaptive | uniform");
  auto* o_out = run->add_option("--out", cfg.out_dir, "output directory");
  auto* o_name = run->add_option("--name", cfg.name, "case label used in reports");
  auto* o_dmesh = run->add_flag("--dump-mesh", cfg.dump_mesh, "also dump the mesh of every iteration");
  auto* o_dsys =
      run->add_flag("--dump-system", cfg.dump_system, "dump the final linear system (i j value)");
  auto* o_ttrace =
      run->add_flag("--time-trace", cfg.time_trace, "fill the seconds column in trace.csv");

  // --- mesh ---
  auto* mesh_cmd = app.add_subcommand("mesh", "generate and dump a builtin mesh");
  std::string mesh_geometry = "lshape";
  int mesh_resolution = 1;
  std::string mesh_out;
  bool mesh_dump = false;
  mesh_cmd->add_option("--geometry", mesh_geometry, "lshape | cook | unit_square");
  mesh_cmd->add_option("--resolution", mesh_resolution, "uniform refinements + 1");
  mesh_cmd->add_flag("--dump", mesh_dump, "write the mesh in msh2d format");
  mesh_cmd->add_option("--out", mesh_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!case_file.empty()) {
        weaksym::CaseConfig merged = weaksym::CaseConfig::from_json_file(case_file);
        // Flags win over the file.
        if (o_geometry->count()) merged.geometry = cfg.geometry;
        if (o_resolution->count()) merged.resolution = cfg.resolution;
        if (o_family->count()) merged.family = cfg.family;
        if (o_k->count()) merged.k = cfg.k;
        if (o_E->count()) merged.E = cfg.E;
        if (o_nu->count()) merged.nu = cfg.nu;
        if (o_mode->count()) merged.mode = cfg.mode;
        if (o_est->count()) merged.estimator = cfg.estimator;
        if (o_mark->count()) merged.mark_factor = cfg.mark_factor;
        if (o_maxdofs->count()) merged.max_dofs = cfg.max_dofs;
        if (o_maxiters->count()) merged.max_iters = cfg.max_iters;
        if (o_refine->count()) merged.refine = cfg.refine;
        if (o_out->count()) merged.out_dir = cfg.out_dir;
        if (o_name->count()) merged.name = cfg.name;
        if (o_dmesh->count()) merged.dump_mesh = cfg.dump_mesh;
        if (o_dsys->count()) merged.dump_system = cfg.dump_system;
        if (o_ttrace->count()) merged.time_trace = cfg.time_trace;
        cfg = merged;
      }
      cfg.validate();
      return run_command(cfg);
    }
    if (mesh_cmd->parsed()) {
      const weaksym::Mesh2D mesh = weaksym::builtin_geometry(mesh_geometry, mesh_resolution);
      if (mesh_dump || !mesh_out.empty()) {
        if (mesh_out.empty()) {
          weaksym::write_msh2d(std::cout, mesh);
        } else {
          std::ofstream os(mesh_out);
          weaksym::write_msh2d(os, mesh);
        }
      } else {
        std::printf("%s resolution %d: %d vertices, %d triangles, %d edges, area %.12g\n",
                    mesh_geometry.c_str(), mesh_resolution, mesh.num_vertices(),
                    mesh.num_triangles(), mesh.num_edges(), mesh.total_area());
      }
      return 0;
    }
  } catch (const weaksym::ValidationError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const weaksym::SolverError& err) {
    std::fprintf(stderr, "solver error: %s\n", err.what());
    return 3;
  }
  return 0;
}
