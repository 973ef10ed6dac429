// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace weaksym {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PlaneMode parse_mode(const std::string& mode) {
  if (mode == "plane_strain") return PlaneMode::Strain;
  if (mode == "plane_stress") return PlaneMode::Stress;
  throw ValidationError("unknown mode '" + mode + "' (plane_strain or plane_stress)");
}

}  // namespace

std::string CaseConfig::display_name() const {
  if (!name.empty()) return name;
  std::ostringstream os;
  os << geometry << "_" << family << k << "_nu" << nu << "_" << estimator;
  if (refine == "uniform") os << "_uniform";
  return os.str();
}

void CaseConfig::validate() const {
  parse_family(family, k);
  parse_mode(mode);
  if (geometry != "lshape" && geometry != "cook" && geometry != "unit_square")
    throw ValidationError("unknown geometry '" + geometry + "'");
  if (estimator != "eta" && estimator != "eta_inc")
    throw ValidationError("unknown estimator '" + estimator + "' (eta or eta_inc)");
  if (refine != "adaptive" && refine != "uniform")
    throw ValidationError("unknown refine mode '" + refine + "' (adaptive or uniform)");
  if (resolution < 1) throw ValidationError("resolution must be >= 1");
  if (max_dofs <= 0 && max_iters <= 0)
    throw ValidationError("one of max_dofs / max_iters must be positive");
  if (mark_factor <= 0.0 || mark_factor > 1.0)
    throw ValidationError("mark_factor must lie in (0, 1]");
  if (E <= 0.0 || nu < 0.0 || nu >= 0.5) throw ValidationError("invalid material parameters");
}

std::string CaseConfig::to_json_text() const {
  nlohmann::json j;
  j["name"] = name;
  j["geometry"] = geometry;
  j["resolution"] = resolution;
  j["family"] = family;
  j["k"] = k;
  j["E"] = E;
  j["nu"] = nu;
  j["mode"] = mode;
  j["estimator"] = estimator;
  j["mark_factor"] = mark_factor;
  j["max_dofs"] = max_dofs;
  j["max_iters"] = max_iters;
  j["refine"] = refine;
  j["out_dir"] = out_dir;
  j["dump_mesh"] = dump_mesh;
  j["dump_system"] = dump_system;
  j["time_trace"] = time_trace;
  return j.dump(2) + "\n";
}

CaseConfig CaseConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ValidationError(std::string("config parse error: ") + err.what());
  }
  CaseConfig cfg;
  auto get = [&j](const char* key, auto& out) {
    if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
  };
  get("name", cfg.name);
  get("geometry", cfg.geometry);
  get("resolution", cfg.resolution);
  get("family", cfg.family);
  get("k", cfg.k);
  get("E", cfg.E);
  get("nu", cfg.nu);
  get("mode", cfg.mode);
  get("estimator", cfg.estimator);
  get("mark_factor", cfg.mark_factor);
  get("max_dofs", cfg.max_dofs);
  get("max_iters", cfg.max_iters);
  get("refine", cfg.refine);
  get("out_dir", cfg.out_dir);
  get("dump_mesh", cfg.dump_mesh);
  get("dump_system", cfg.dump_system);
  get("time_trace", cfg.time_trace);
  cfg.validate();
  return cfg;
}

CaseConfig CaseConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

BenchProblem make_case_problem(const CaseConfig& cfg) {
  cfg.validate();
  BenchProblem prob;
  prob.initial_mesh = builtin_geometry(cfg.geometry, cfg.resolution);
  prob.material = Material::from_young_poisson(cfg.E, cfg.nu, parse_mode(cfg.mode));
  prob.data.body_load = [](Vec2) { return Vec2{0.0, 0.0}; };

  if (cfg.geometry == "lshape") {
    if (prob.material.mode != PlaneMode::Strain)
      throw ValidationError("lshape: the closed-form solution requires plane strain");
    // Pure traction with the exact boundary stress; fields defined up to
    // rigid-body modes, fixed by the solver's mean constraints.
    auto exact = std::make_shared<LShapeExact>(prob.material);
    exact->validate_traction_free();
    prob.data.tractions["all"] = [exact](Vec2 p, Vec2 n) { return exact->stress(p).apply(n); };
    prob.data.singular_point = Vec2{0.0, 0.0};
    prob.data.exact_stress = [exact](Vec2 p) { return exact->stress(p); };
    prob.data.exact_displacement = [exact](Vec2 p) { return exact->displacement(p); };
    prob.data.norm_C = lshape_stress_norm_C(prob.material);
    prob.data.norm_0 = lshape_stress_norm_0();
  } else if (cfg.geometry == "cook") {
    prob.data.tractions["load"] = [](Vec2, Vec2) { return Vec2{0.0, 1e-3}; };
    prob.data.tractions["free"] = [](Vec2, Vec2) { return Vec2{0.0, 0.0}; };
  } else {  // unit_square: clamped everywhere under a constant body load
    prob.data.body_load = [](Vec2) { return Vec2{0.0, -1.0}; };
  }
  return prob;
}

void write_trace_csv(std::ostream& os, const AdaptiveTrace& trace, bool time_trace) {
  os << "iter,N,n_S,n_R,n_V,eta,eta_inc,osc_f,osc_g,"
        "e_C_sigma,e_C_u,e_mean,e_inc_sigma,e_inc_u,seconds\n";
  for (const auto& r : trace.rows) {
    os << r.iter << "," << r.n_elems << "," << r.n_S << "," << r.n_R << "," << r.n_V << ","
       << format_double(r.eta) << "," << format_double(r.eta_inc) << ","
       << format_double(r.osc_f) << "," << format_double(r.osc_g) << ",";
    if (r.exact) {
      os << format_double(r.exact->e_C_sigma) << "," << format_double(r.exact->e_C_u) << ","
         << format_double(r.exact->e_mean) << "," << format_double(r.exact->e_inc_sigma) << ","
         << format_double(r.exact->e_inc_u) << ",";
    } else {
      os << ",,,,,";
    }
    if (time_trace) os << format_double(r.seconds);
    os << "\n";
  }
}

double fit_slope_loglog(const std::vector<double>& n, const std::vector<double>& value) {
  if (n.size() != value.size()) throw ValidationError("fit_slope_loglog: size mismatch");
  const std::size_t begin = n.size() / 2;
  std::vector<double> xs, ys;
  for (std::size_t i = begin; i < n.size(); ++i) {
    if (value[i] > 0.0 && n[i] > 0.0) {
      xs.push_back(std::log10(n[i]));
      ys.push_back(std::log10(value[i]));
    }
  }
  if (xs.size() < 3)
    throw ValidationError("fit_slope_loglog: fewer than 3 usable iterations (slope undefined)");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

TraceSeries trace_series(const std::string& name, const AdaptiveTrace& trace) {
  TraceSeries s;
  s.name = name;
  const bool has_exact = !trace.rows.empty() && trace.rows.front().exact.has_value();
  TraceColumn eta{"eta", {}}, eta_inc{"eta_inc", {}};
  TraceColumn ecs{"e_C_sigma", {}}, ecu{"e_C_u", {}}, em{"e_mean", {}}, eis{"e_inc_sigma", {}},
      eiu{"e_inc_u", {}};
  for (const auto& r : trace.rows) {
    s.n_elems.push_back(r.n_elems);
    eta.values.push_back(r.eta);
    eta_inc.values.push_back(r.eta_inc);
    if (has_exact && r.exact) {
      ecs.values.push_back(r.exact->e_C_sigma);
      ecu.values.push_back(r.exact->e_C_u);
      em.values.push_back(r.exact->e_mean);
      eis.values.push_back(r.exact->e_inc_sigma);
      eiu.values.push_back(r.exact->e_inc_u);
    }
  }
  s.columns = {eta, eta_inc};
  if (has_exact) {
    s.columns.push_back(ecs);
    s.columns.push_back(ecu);
    s.columns.push_back(em);
    s.columns.push_back(eis);
    s.columns.push_back(eiu);
  }
  return s;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

void render_svg(const std::vector<TraceSeries>& traces, std::ostream& os) {
  // Collect the plotted (x,y) = (log10 N, log10 value) range.
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& tr : traces)
    for (const auto& col : tr.columns)
      for (std::size_t i = 0; i < col.values.size(); ++i)
        if (col.values[i] > 0.0) {
          xmin = std::min(xmin, std::log10(tr.n_elems[i]));
          xmax = std::max(xmax, std::log10(tr.n_elems[i]));
          ymin = std::min(ymin, std::log10(col.values[i]));
          ymax = std::max(ymax, std::log10(col.values[i]));
        }
  if (xmin > xmax) {
    xmin = ymin = 0.0;
    xmax = ymax = 1.0;
  }
  const double W = 860, H = 600, L = 70, R = 240, T = 30, B = 50;
  auto px = [&](double x) { return L + (x - xmin) / std::max(xmax - xmin, 1e-12) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / std::max(ymax - ymin, 1e-12) * (H - T - B); };

  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d) {
    os << "<line x1='" << px(d) << "' y1='" << py(ymin) << "' x2='" << px(d) << "' y2='"
       << py(ymax) << "' stroke='#dddddd'/>\n";
    os << "<text x='" << px(d) << "' y='" << H - B + 18 << "' font-size='12' text-anchor='middle'>1e"
       << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d) {
    os << "<line x1='" << px(xmin) << "' y1='" << py(d) << "' x2='" << px(xmax) << "' y2='"
       << py(d) << "' stroke='#dddddd'/>\n";
    os << "<text x='" << L - 8 << "' y='" << py(d) + 4 << "' font-size='12' text-anchor='end'>1e"
       << d << "</text>\n";
  }
  os << "<rect x='" << L << "' y='" << T << "' width='" << W - L - R << "' height='" << H - T - B
     << "' fill='none' stroke='black'/>\n";
  os << "<text x='" << (L + W - R) / 2 << "' y='" << H - 12
     << "' font-size='13' text-anchor='middle'>elements N</text>\n";

  int color = 0;
  double legend_y = T + 16;
  for (const auto& tr : traces)
    for (const auto& col : tr.columns) {
      if (col.values.empty()) continue;
      const char* c = kPalette[color % 10];
      ++color;
      os << "<polyline fill='none' stroke='" << c << "' stroke-width='1.6' points='";
      for (std::size_t i = 0; i < col.values.size(); ++i)
        if (col.values[i] > 0.0)
          os << px(std::log10(tr.n_elems[i])) << "," << py(std::log10(col.values[i])) << " ";
      os << "'/>\n";
      os << "<line x1='" << W - R + 16 << "' y1='" << legend_y - 4 << "' x2='" << W - R + 44
         << "' y2='" << legend_y - 4 << "' stroke='" << c << "' stroke-width='2'/>\n";
      os << "<text x='" << W - R + 50 << "' y='" << legend_y << "' font-size='12'>" << tr.name
         << " " << col.name << "</text>\n";
      legend_y += 16;
    }
  os << "</svg>\n";
}

}  // namespace

void emit_report(const std::vector<TraceSeries>& traces, std::ostream& summary,
                 std::ostream& svg) {
  if (traces.empty()) throw ValidationError("emit_report: need at least one trace");
  for (const auto& tr : traces) {
    summary << "case " << tr.name << " (" << tr.n_elems.size() << " iterations, final N = "
            << (tr.n_elems.empty() ? 0 : static_cast<int>(tr.n_elems.back())) << ")\n";
    for (const auto& col : tr.columns) {
      summary << "  slope[" << col.name << " vs N] = ";
      try {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%+.3f", fit_slope_loglog(tr.n_elems, col.values));
        summary << buf << "\n";
      } catch (const ValidationError&) {
        summary << "n/a\n";
      }
    }
  }
  render_svg(traces, svg);
}

RunResult run_case(const CaseConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  BenchProblem prob = make_case_problem(cfg);
  const FamilyConfig fam = parse_family(cfg.family, cfg.k);
  const EstimatorKind kind =
      cfg.estimator == "eta" ? EstimatorKind::Eta : EstimatorKind::EtaInc;
  const RefineMode mode = cfg.refine == "uniform" ? RefineMode::Uniform : RefineMode::Adaptive;
  StopRule stop{cfg.max_dofs, cfg.max_iters};

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  RunResult result;
  double finest_norm_C = 0.0, finest_norm_0 = 0.0, worst_condition = 0.0;
  auto observer = [&](const IterationState& it) {
    std::ofstream ind(fs::path(cfg.out_dir) /
                      ("indicators_" + std::to_string(it.iter) + ".csv"));
    ind << "element_id,eta_local,eta_inc_local\n";
    for (int t = 0; t < it.disc.mesh().num_triangles(); ++t)
      ind << t << "," << format_double(std::sqrt(it.report.local_eta2[t])) << ","
          << format_double(std::sqrt(it.report.local_eta_inc2[t])) << "\n";
    if (cfg.dump_mesh) {
      std::ofstream ms(fs::path(cfg.out_dir) / ("mesh_" + std::to_string(it.iter) + ".msh2d"));
      write_msh2d(ms, it.disc.mesh());
    }
    worst_condition = std::max(worst_condition, it.disc.max_vandermonde_condition());
    if (it.marked == nullptr) {
      result.final_mesh = it.disc.mesh();
      if (!prob.data.has_exact()) {
        const auto norms = discrete_stress_norms(it.disc, prob.material, it.sol);
        finest_norm_C = norms.first;
        finest_norm_0 = norms.second;
      }
      if (cfg.dump_system) {
        const MixedSystem sys = assemble(it.disc, prob.material, prob.data);
        std::ofstream dump(fs::path(cfg.out_dir) / "system.txt");
        dump_system(dump, sys);
      }
    }
  };

  result.trace = adaptive_solve_loop(prob.initial_mesh, prob.material, fam, prob.data, kind,
                                     stop, mode, cfg.mark_factor, observer);

  // Without a closed-form solution the estimator columns are scaled by the
  // discrete norms of the finest solution.
  if (!prob.data.has_exact() && finest_norm_C > 0.0) {
    result.norm_scale_C = finest_norm_C;
    const double inc_scale = finest_norm_0 / std::sqrt(prob.material.mu);
    for (auto& row : result.trace.rows) {
      row.eta /= finest_norm_C;
      row.eta_inc /= inc_scale;
    }
  } else {
    result.norm_scale_C = prob.data.norm_C;
  }

  {
    std::ofstream os(fs::path(cfg.out_dir) / "trace.csv");
    write_trace_csv(os, result.trace, cfg.time_trace);
  }
  {
    std::ofstream os(fs::path(cfg.out_dir) / "mesh_final.msh2d");
    write_msh2d(os, result.final_mesh);
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    std::ofstream summary(fs::path(cfg.out_dir) / "summary.txt");
    std::ofstream svg(fs::path(cfg.out_dir) / "report.svg");
    summary << "config: " << cfg.display_name() << "\n";
    summary << "wall seconds: " << result.wall_seconds << "\n";
    summary << "worst element Vandermonde condition: " << worst_condition << "\n";
    std::vector<TraceSeries> series = {trace_series(cfg.display_name(), result.trace)};
    emit_report(series, summary, svg);
    summary << "per-iteration seconds:";
    for (const auto& r : result.trace.rows) {
      char buf[16];
      std::snprintf(buf, sizeof buf, " %.2f", r.seconds);
      summary << buf;
    }
    summary << "\n";
  }
  return result;
}

}  // namespace weaksym
