// Acceptance suite: runs the benchmark studies end to end and checks every
// guaranteed property at its stated tolerance, printing one line per
// criterion.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "weaksym/bench.hpp"
#include "weaksym/quadrature.hpp"

using namespace weaksym;

namespace {

void report(bool ok, int idx, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", idx, what.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", idx, ": ", what);
}

struct IterRecord {
  int n_elems = 0, dofs = 0;
  double eta = 0.0, eta_inc = 0.0;               // relative estimators
  double abs_mean = 0.0;                          // ||sigma - mean||_C (absolute)
  double rhs_bound = 0.0;                         // guaranteed-bound right-hand side
  double e_C_sigma = 0.0, e_inc_sigma = 0.0, e_inc_u = 0.0;  // relative errors
  double equilibrium = 0.0, weak_symmetry = 0.0;  // discrete identity residuals
  double sigma_norm_0 = 0.0, sigma_norm_C = 0.0;  // discrete stress norms
};

struct BenchRun {
  FamilyConfig cfg;
  std::vector<IterRecord> iters;
  std::vector<double> n_elems, e_C_sigma, e_inc_sigma, eta;
};

BenchRun run_lshape(Family family, int k, double nu, EstimatorKind kind, int max_dofs) {
  CaseConfig cc;
  cc.geometry = "lshape";
  cc.family = family == Family::AFW ? "afw" : (family == Family::RAFW ? "rafw" : "sgg");
  cc.k = k;
  cc.nu = nu;
  BenchProblem prob = make_case_problem(cc);

  BenchRun run;
  run.cfg = {family, k};
  auto observer = [&](const IterationState& it) {
    IterRecord rec;
    rec.n_elems = it.disc.mesh().num_triangles();
    rec.dofs = it.disc.layout().n_total;
    rec.eta = it.report.eta;
    rec.eta_inc = it.report.eta_inc;
    rec.abs_mean = it.report.exact->abs_mean;
    rec.rhs_bound = 0.5 * std::sqrt(it.report.term2_grad_C) +
                    kSkewFactor * std::sqrt(it.report.term2_skew_C) + it.report.osc_f +
                    it.report.osc_g;
    rec.e_C_sigma = it.report.exact->e_C_sigma;
    rec.e_inc_sigma = it.report.exact->e_inc_sigma;
    rec.e_inc_u = it.report.exact->e_inc_u;
    const auto ident = verify_discrete_identities(it.disc, it.sol, prob.data);
    rec.equilibrium = ident.equilibrium_residual;
    rec.weak_symmetry = ident.weak_symmetry_residual;
    const auto norms = discrete_stress_norms(it.disc, prob.material, it.sol);
    rec.sigma_norm_C = norms.first;
    rec.sigma_norm_0 = norms.second;
    run.iters.push_back(rec);
    run.n_elems.push_back(rec.n_elems);
    run.e_C_sigma.push_back(rec.e_C_sigma);
    run.e_inc_sigma.push_back(rec.e_inc_sigma);
    run.eta.push_back(rec.eta);
  };
  adaptive_solve_loop(prob.initial_mesh, prob.material, {family, k}, prob.data, kind,
                      StopRule{max_dofs, 200}, RefineMode::Adaptive, 0.25, observer);
  return run;
}

// Shared heavy runs, built once on first use.
struct Cache {
  std::map<std::string, BenchRun> runs;

  const BenchRun& lshape(Family family, int k, double nu, EstimatorKind kind, int max_dofs) {
    std::ostringstream key;
    key << static_cast<int>(family) << k << "_" << nu << "_" << static_cast<int>(kind);
    auto it = runs.find(key.str());
    if (it == runs.end())
      it = runs.emplace(key.str(), run_lshape(family, k, nu, kind, max_dofs)).first;
    return it->second;
  }

  static Cache& get() {
    static Cache cache;
    return cache;
  }
};

// Dof budgets per run. AFW2 approaches its asymptotic slope later than the
// other families, so its windows need larger runs; everything is
// deterministic, so these budgets give reproducible fits.
inline int nu03_budget(Family f, int k) {
  if (f == Family::SGG && k == 2) return 200000;  // criterion 4 reference run
  if (f == Family::AFW) return 250000;
  return 120000;
}
inline int nu4999_budget(Family f, int) { return f == Family::AFW ? 300000 : 60000; }

const BenchRun& nu03_run(Family f, int k) {
  return Cache::get().lshape(f, k, 0.3, EstimatorKind::Eta, nu03_budget(f, k));
}
const BenchRun& nu4999_run(Family f, int k) {
  return Cache::get().lshape(f, k, 0.4999, EstimatorKind::EtaInc, nu4999_budget(f, k));
}

struct PatchResult {
  double e_C_sigma = 0.0;
  double equilibrium = 0.0;
  double sigma_norm_0 = 0.0;
};

PatchResult run_patch(FamilyConfig cfg) {
  Mesh2D m = builtin_geometry("unit_square", 1);
  std::vector<std::pair<std::pair<int, int>, BoundaryTag>> tags;
  for (const auto& e : m.edges)
    if (e.boundary())
      tags.push_back({{e.a, e.b}, BoundaryTag{BoundaryTag::Kind::Neumann, "all"}});
  Mesh2D mesh = finalize_mesh(m.vertices, m.triangles, tags);
  mesh = uniform_refine(uniform_refine(mesh));

  const Material mat = Material::from_lame(1.0, 1.0, PlaneMode::Strain);
  const Mat2 sigma_exact(2.0, 0.0, 0.0, -2.0);
  ProblemData data;
  data.body_load = [](Vec2) { return Vec2{0.0, 0.0}; };
  data.tractions["all"] = [sigma_exact](Vec2, Vec2 n) { return sigma_exact.apply(n); };
  data.exact_stress = [sigma_exact](Vec2) { return sigma_exact; };
  data.norm_C = std::sqrt(mat.compliance_energy(sigma_exact));  // area 1
  data.norm_0 = frob(sigma_exact);

  const Discretization disc(mesh, cfg);
  const MixedSolution sol = solve_saddle(assemble(disc, mat, data));
  PostField post = local_postprocess(disc, mat, sol);
  oswald_average(disc, post);
  PatchResult res;
  res.e_C_sigma = exact_errors(disc, mat, sol, post, data).e_C_sigma;
  res.equilibrium = verify_discrete_identities(disc, sol, data).equilibrium_residual;
  res.sigma_norm_0 = discrete_stress_norms(disc, mat, sol).second;
  return res;
}

}  // namespace

TEST_CASE("criterion 1: exact discrete equilibrium") {
  // f = 0 on all benchmark cases, so the bound reads
  // max_K ||div sigma_h + P_K f|| <= 1e-9 ||sigma_h||_0.
  bool ok = true;
  double worst = 0.0;
  for (const Family f : {Family::AFW, Family::RAFW, Family::SGG}) {
    const BenchRun& run = nu03_run(f, 2);
    for (const auto& rec : run.iters) {
      const double rel = rec.equilibrium / rec.sigma_norm_0;
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-9;
      ok = ok && rec.weak_symmetry <= 1e-9 * rec.sigma_norm_0;
    }
  }
  for (const FamilyConfig cfg :
       {FamilyConfig{Family::SGG, 3}, FamilyConfig{Family::AFW, 2}}) {
    const PatchResult pr = run_patch(cfg);
    ok = ok && pr.equilibrium <= 1e-9 * pr.sigma_norm_0;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "max_K ||div sigma_h + P_h f|| <= 1e-9 (||f|| + ||sigma_h||) on every solved "
                "case (worst %.2e relative)",
                worst);
  report(ok, 1, buf);
}

TEST_CASE("criterion 2: patch test for all families") {
  bool ok = true;
  double worst = 0.0;
  for (const FamilyConfig cfg : {FamilyConfig{Family::AFW, 2}, FamilyConfig{Family::RAFW, 2},
                                 FamilyConfig{Family::SGG, 2}, FamilyConfig{Family::SGG, 3}}) {
    const PatchResult pr = run_patch(cfg);
    worst = std::max(worst, pr.e_C_sigma);
    ok = ok && pr.e_C_sigma <= 1e-9;
  }
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "manufactured linear displacement reproduced by afw2/rafw2/sgg2/sgg3 "
                "(worst e_C_sigma %.2e)",
                worst);
  report(ok, 2, buf);
}

TEST_CASE("criterion 3: hypercircle Pythagoras identity") {
  const Material mat = Material::from_lame(1.3, 0.8, PlaneMode::Strain);
  auto grad_u = [](Vec2 p) {
    return Mat2(2.0 * p.x * p.y + p.x * p.x, p.x * p.x, p.y * p.y, 2.0 * p.y * p.x - 2.0 * p.y);
  };
  auto sigma = [&](Vec2 p) { return mat.elasticity(grad_u(p).sym()); };
  auto airy = [](Vec2 p) {
    const double x = p.x, y = p.y;
    const double psi_yy = 2.0 * x * x * x * (1.0 - x);
    const double psi_xy = (3.0 * x * x - 4.0 * x * x * x) * 2.0 * y;
    const double psi_xx = (6.0 * x - 12.0 * x * x) * y * y;
    return Mat2(psi_yy, -psi_xy, -psi_xy, psi_xx);
  };
  auto grad_w = [](Vec2 p) {
    const double x = p.x, y = p.y;
    const double bx = (1.0 - 2.0 * x) * y * (1.0 - y);
    const double by = x * (1.0 - x) * (1.0 - 2.0 * y);
    const double b = x * (1.0 - x) * y * (1.0 - y);
    return Mat2(bx * (1.0 + x) + b, by * (1.0 + x), bx * (2.0 - y), by * (2.0 - y) - b);
  };
  const Mesh2D mesh = builtin_geometry("unit_square", 1);
  auto cnorm2 = [&](auto&& field) {
    double acc = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const ElementGeometry geo = element_geometry(mesh, t);
      for_each_tri_point(geo.v[0], geo.v[1], geo.v[2], triangle_rule(16),
                         [&](Vec2 p, double w) { acc += w * mat.compliance_energy(field(p)); });
    }
    return acc;
  };
  auto Sigma = [&](Vec2 p) { return sigma(p) + airy(p); };
  auto AepsU = [&](Vec2 p) { return mat.elasticity((grad_u(p) + grad_w(p)).sym()); };
  const double lhs = cnorm2([&](Vec2 p) { return sigma(p) - Sigma(p); }) +
                     cnorm2([&](Vec2 p) { return sigma(p) - AepsU(p); });
  const double rhs = cnorm2([&](Vec2 p) { return Sigma(p) - AepsU(p); });
  const double rel = std::abs(lhs - rhs) / rhs;
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "|sigma-Sigma|_C^2 + |sigma-Aeps(U)|_C^2 = |Sigma-Aeps(U)|_C^2 to %.2e relative",
                rel);
  report(rel <= 1e-10, 3, buf);
}

TEST_CASE("criterion 4: guaranteed mean-value bound on the adaptive L-shape run") {
  const BenchRun& run = nu03_run(Family::SGG, 2);
  bool ok = true;
  double worst_slack = 1e300;
  for (const auto& rec : run.iters) {
    const double slack = (rec.rhs_bound - rec.abs_mean) / rec.rhs_bound;
    worst_slack = std::min(worst_slack, slack);
    ok = ok && slack >= -1e-8;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "||sigma-(sigma_h+Aeps(u_avg))/2||_C <= 1/2||...||_C + phi||skew||_C + osc on "
                "all %zu iterations (min relative slack %+.3f)",
                run.iters.size(), worst_slack);
  report(ok, 4, buf);
}

TEST_CASE("criterion 5: uniform-refinement estimator rate on the L-shape") {
  CaseConfig cc;
  cc.geometry = "lshape";
  cc.family = "rafw";
  cc.k = 2;
  cc.refine = "uniform";
  cc.max_iters = 6;
  cc.max_dofs = 0;
  cc.out_dir = "acceptance_out/uniform";
  const RunResult res = run_case(cc);
  const TraceSeries series = trace_series("uniform", res.trace);
  double slope = 0.0;
  for (const auto& col : series.columns)
    if (col.name == "eta") slope = fit_slope_loglog(series.n_elems, col.values);
  char buf[120];
  std::snprintf(buf, sizeof buf, "uniform eta slope vs N = %.3f in [-0.32, -0.22]", slope);
  report(slope >= -0.32 && slope <= -0.22, 5, buf);
}

TEST_CASE("criterion 6: adaptive optimal rates per family") {
  const std::vector<std::tuple<Family, int, double>> targets = {
      {Family::AFW, 2, -1.0}, {Family::RAFW, 2, -1.0}, {Family::SGG, 2, -1.5},
      {Family::SGG, 3, -2.0}};
  bool ok = true;
  std::string desc = "e_C_sigma slopes vs N:";
  for (const auto& [f, k, target] : targets) {
    const BenchRun& run = nu03_run(f, k);
    const double slope = fit_slope_loglog(run.n_elems, run.e_C_sigma);
    const bool in_band = std::abs(slope - target) <= 0.15 * std::abs(target);
    ok = ok && in_band;
    char buf[64];
    std::snprintf(buf, sizeof buf, " %s%d %.3f (target %.1f)", f == Family::AFW ? "afw" :
                  (f == Family::RAFW ? "rafw" : "sgg"), k, slope, target);
    desc += buf;
  }
  report(ok, 6, desc);
}

TEST_CASE("criterion 7: incompressible robustness at nu = 0.4999") {
  const std::vector<std::tuple<Family, int, double>> targets = {
      {Family::AFW, 2, -1.0}, {Family::RAFW, 2, -1.0}, {Family::SGG, 2, -1.5},
      {Family::SGG, 3, -2.0}};
  bool ok = true;
  std::string desc;
  for (const auto& [f, k, target] : targets) {
    const BenchRun& inc = nu4999_run(f, k);
    const BenchRun& mod = nu03_run(f, k);
    // Matched-dof comparisons over the last half of the incompressible run.
    double eta_ratio_finest = 0.0;
    bool ratios_ok = true;
    int matched = 0;
    for (std::size_t i = inc.iters.size() / 2; i < inc.iters.size(); ++i) {
      const auto& a = inc.iters[i];
      const IterRecord* best = nullptr;
      for (const auto& b : mod.iters)
        if (!best || std::abs(b.dofs - a.dofs) < std::abs(best->dofs - a.dofs)) best = &b;
      if (!best || std::abs(best->dofs - a.dofs) > 0.2 * a.dofs) continue;
      ++matched;
      const double r_inc = a.eta_inc / best->eta_inc;
      ratios_ok = ratios_ok && r_inc >= 1.0 / 3.0 && r_inc <= 3.0;
      eta_ratio_finest = a.eta / best->eta;
    }
    const double slope = fit_slope_loglog(inc.n_elems, inc.e_inc_sigma);
    const bool slope_ok = std::abs(slope - target) <= 0.2 * std::abs(target);
    const bool family_ok = matched >= 3 && ratios_ok && eta_ratio_finest > 10.0 && slope_ok;
    ok = ok && family_ok;
    char buf[120];
    std::snprintf(buf, sizeof buf, " %s%d[eta_inc-ratio ok:%d eta-ratio %.0f slope %.2f]",
                  f == Family::AFW ? "afw" : (f == Family::RAFW ? "rafw" : "sgg"), k,
                  static_cast<int>(ratios_ok), eta_ratio_finest, slope);
    desc += buf;
  }
  report(ok, 7, "eta_inc stable, eta deteriorates >10x, e_inc_sigma rates hold:" + desc);
}

TEST_CASE("criterion 8: divergence-free trace-free SGG bubbles on random elements") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> logs(-3.0, 1.5);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vec2 a, b, c;
    double scale = 1.0;
    do {
      scale = std::pow(10.0, logs(rng));
      a = Vec2{uni(rng), uni(rng)} * scale;
      b = Vec2{uni(rng), uni(rng)} * scale;
      c = Vec2{uni(rng), uni(rng)} * scale;
    } while (std::abs(cross(b - a, c - a)) < 0.1 * scale * scale);
    std::vector<Vec2> verts = {a, b, c};
    std::vector<Triangle> tris(1);
    tris[0].v = cross(b - a, c - a) > 0 ? std::array<int, 3>{0, 1, 2} : std::array<int, 3>{0, 2, 1};
    BoundaryTag d{BoundaryTag::Kind::Dirichlet, ""};
    const Mesh2D mesh = finalize_mesh(verts, tris, {{{0, 1}, d}, {{1, 2}, d}, {{0, 2}, d}});
    const int k = trial % 2 == 0 ? 2 : 3;
    const ElementStressBasis basis(mesh, 0, {Family::SGG, k});
    const ElementGeometry geo = basis.geometry();
    for (int fn = 0; fn < basis.size(); ++fn) {
      if (basis.dofs()[fn].kind != StressDof::Kind::Bubble) continue;
      double vmax = 0.0, dmax = 0.0, tmax = 0.0;
      for_each_tri_point(geo.v[0], geo.v[1], geo.v[2], triangle_rule(8), [&](Vec2 p, double) {
        vmax = std::max(vmax, frob(basis.value(fn, p)));
        dmax = std::max(dmax, norm(basis.divergence(fn, p)));
      });
      for (int le = 0; le < 3; ++le) {
        const Vec2 pa = geo.v[(le + 1) % 3], pb = geo.v[(le + 2) % 3];
        for (const auto& q : edge_rule(10).points)
          tmax = std::max(tmax, norm(basis.normal_trace(fn, le, pa + (pb - pa) * q.t)));
      }
      const double rel = std::max(dmax * geo.h, tmax) / vmax;
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-12;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "max |div tau| h and |tau n| <= 1e-12 |tau| on 100 random elements (worst %.1e)",
                worst);
  report(ok, 8, buf);
}

TEST_CASE("criterion 9: Cook's membrane corner concentration and monotone eta") {
  CaseConfig cc;
  cc.geometry = "cook";
  cc.resolution = 4;
  BenchProblem prob = make_case_problem(cc);
  const std::vector<Vec2> corners = {{0, 0}, {48, 0}, {48, 60}, {0, 44}};

  std::vector<double> etas;
  int marked_total = 0, marked_near = 0;
  auto observer = [&](const IterationState& it) {
    etas.push_back(it.report.eta_raw);
    if (it.iter < 5 && it.marked != nullptr) {
      for (int t : *it.marked) {
        ++marked_total;
        const Vec2 c = it.disc.mesh().centroid(t);
        for (const auto& corner : corners)
          if (norm(c - corner) <= 6.0) {
            ++marked_near;
            break;
          }
      }
    }
  };
  adaptive_solve_loop(prob.initial_mesh, prob.material, {Family::SGG, 2}, prob.data,
                      EstimatorKind::Eta, StopRule{50000, 200}, RefineMode::Adaptive, 0.25,
                      observer);
  bool monotone = true;
  for (std::size_t i = 3; i + 1 < etas.size(); ++i) monotone = monotone && etas[i + 1] < etas[i];
  const double frac = static_cast<double>(marked_near) / std::max(marked_total, 1);
  const bool ok = monotone && frac >= 0.6;
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "eta decreases monotonically after iteration 3 (%s); %.0f%% of first-5-iteration "
                "marks within 6 of a corner",
                monotone ? "yes" : "no", 100.0 * frac);
  report(ok, 9, buf);
}

TEST_CASE("invariants: effectivity band and error monotonicity on the L-shape") {
  // eta / e_mean stays within the loose engineering band [1, 50]; the energy
  // errors are nonincreasing after the first 3 iterations.
  const BenchRun& run = nu03_run(Family::SGG, 2);
  bool eff_ok = true, mono_ok = true;
  double eff_min = 1e300, eff_max = 0.0;
  for (const auto& rec : run.iters) {
    const double eff = rec.rhs_bound / rec.abs_mean;
    eff_min = std::min(eff_min, eff);
    eff_max = std::max(eff_max, eff);
    eff_ok = eff_ok && eff >= 1.0 && eff <= 50.0;
  }
  for (std::size_t i = 3; i + 1 < run.iters.size(); ++i)
    mono_ok = mono_ok && run.iters[i + 1].e_C_sigma <= run.iters[i].e_C_sigma &&
              run.iters[i + 1].e_inc_u <= run.iters[i].e_inc_u;
  char buf[120];
  std::snprintf(buf, sizeof buf, "effectivity in [%.2f, %.2f]; e_C_sigma, e_inc_u monotone: %s",
                eff_min, eff_max, mono_ok ? "yes" : "no");
  std::printf("[%s] invariants: %s\n", (eff_ok && mono_ok) ? "PASS" : "FAIL", buf);
  CHECK(eff_ok);
  CHECK(mono_ok);
}

TEST_CASE("criterion 10: byte-identical trace.csv on repeated runs") {
  namespace fs = std::filesystem;
  auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool ok = true;
  for (int variant = 0; variant < 2; ++variant) {
    CaseConfig cc;
    if (variant == 0) {
      cc.geometry = "lshape";
      cc.family = "sgg";
      cc.k = 2;
    } else {
      cc.geometry = "cook";
      cc.resolution = 3;
      cc.family = "rafw";
      cc.k = 2;
    }
    cc.max_iters = 6;
    cc.max_dofs = 0;
    cc.out_dir = "acceptance_out/det_a";
    run_case(cc);
    const std::string a = read_file("acceptance_out/det_a/trace.csv");
    cc.out_dir = "acceptance_out/det_b";
    run_case(cc);
    const std::string b = read_file("acceptance_out/det_b/trace.csv");
    ok = ok && !a.empty() && a == b;
  }
  report(ok, 10, "two runs of lshape/sgg2 and cook/rafw2 produce identical trace.csv bytes");
}
