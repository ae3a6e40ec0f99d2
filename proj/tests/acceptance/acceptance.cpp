// Acceptance suite: runs every study at desk scale and prints one PASS/FAIL
// line per criterion, followed by the measured numbers. Exit status is 0 only
// when every criterion passes.
//
// Usage: dec_acceptance [output_dir]

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "dec/dual_geometry.hpp"
#include "dec/errors.hpp"
#include "dec/experiment.hpp"
#include "dec/exterior_derivative.hpp"
#include "dec/forms.hpp"
#include "dec/mesh_gen.hpp"
#include "dec/mesh_io.hpp"
#include "dec/poisson.hpp"
#include "support/dense_oracle.hpp"

using namespace dec;
namespace fs = std::filesystem;

namespace {

constexpr int kBaseTriangles = 512;
constexpr int kLevels = 4;
constexpr int kOneFormLevels = 5;
constexpr int kShearCells = 64;

const std::vector<MeshGroup> kFourGroups{MeshGroup::Delaunay, MeshGroup::Nd1, MeshGroup::Nd5, MeshGroup::Nd15};

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;
  void check(bool ok, std::string line) {
    pass = pass && ok;
    details.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", line));
  }
};

struct StudyRun {
  ConvergenceReport report;
  double seconds = 0.0;
  fs::path dir;
  std::string error;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StudyRun run_study(const fs::path& root, Study study, MeshGroup group, int levels) {
  ExperimentConfig c;
  c.study = study;
  c.group = group;
  c.levels = levels;
  c.base_triangles = kBaseTriangles;
  c.seed = 7;
  c.output_dir = root / fmt::format("{}_{}", to_string(study), to_string(group));
  StudyRun run;
  run.dir = c.output_dir;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    run.report = run_convergence(c);
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  run.seconds = seconds_since(t0);
  fmt::print(stderr, "  ran {} / {}: slope {:.3f} in {:.1f} s\n", to_string(study), to_string(group),
             run.report.fit.slope, run.seconds);
  return run;
}

void check_slope(Outcome& out, const StudyRun& run, MeshGroup group, double lo, double hi) {
  if (!run.error.empty()) {
    out.check(false, fmt::format("{}: run failed: {}", to_string(group), run.error));
    return;
  }
  const double s = run.report.fit.slope;
  out.check(s >= lo && s <= hi,
            fmt::format("{}: slope {:.3f} (residual {:.3f}, {} levels, finest {} triangles) in [{}, {}]",
                        to_string(group), s, run.report.fit.residual, run.report.rows.size(),
                        run.report.rows.empty() ? 0 : run.report.rows.back().triangles, lo, hi));
}

std::vector<SimplicialComplex2> persisted_meshes(const StudyRun& run) {
  std::vector<SimplicialComplex2> out;
  for (std::size_t k = 0; k < run.report.rows.size(); ++k)
    out.push_back(read_mesh(run.dir / "meshes" / fmt::format("level{}.off", k)));
  return out;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void print(int id, const std::string& name, const Outcome& o) {
  fmt::print("criterion {:>2} {}: {}\n", id, o.pass ? "PASS" : "FAIL", name);
  for (const auto& d : o.details) fmt::print("    {}\n", d);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_runs");
  fs::create_directories(root);
  std::map<int, bool> results;

  // ---- 1. primal 0-form ------------------------------------------------------------
  std::map<MeshGroup, StudyRun> primal;
  {
    Outcome o;
    for (auto g : kFourGroups) {
      primal[g] = run_study(root, Study::Poisson0Primal, g, kLevels);
      check_slope(o, primal[g], g, 1.7, 2.3);
      o.check(primal[g].seconds < 180.0, fmt::format("{}: runtime {:.1f} s < 180 s", to_string(g), primal[g].seconds));
    }
    print(1, "primal 0-form Poisson second order", o);
    results[1] = o.pass;
  }

  // ---- 2. dual 0-form --------------------------------------------------------------
  {
    Outcome o;
    for (auto g : kFourGroups) {
      const auto run = run_study(root, Study::Poisson0Dual, g, kLevels);
      check_slope(o, run, g, 0.7, 1.3);
      if (run.error.empty())
        o.details.push_back(fmt::format("     {}: piecewise-constant error slope {:.3f} (not asserted)", to_string(g),
                                        run.report.fit_piecewise_constant.slope));
    }
    print(2, "dual 0-form Poisson first order", o);
    results[2] = o.pass;
  }

  // ---- 3. 1-form -------------------------------------------------------------------
  {
    Outcome o;
    for (auto g : kFourGroups) check_slope(o, run_study(root, Study::Poisson1, g, kOneFormLevels), g, 0.7, 1.3);
    print(3, "1-form Poisson first order", o);
    results[3] = o.pass;
  }

  // ---- 4. Navier-Stokes Poiseuille ---------------------------------------------------
  StudyRun subdivided;
  {
    Outcome o;
    for (auto g : kFourGroups) check_slope(o, run_study(root, Study::NsPoiseuille, g, kLevels), g, 0.7, 1.3);
    subdivided = run_study(root, Study::NsPoiseuille, MeshGroup::Subdivided, kLevels);
    check_slope(o, subdivided, MeshGroup::Subdivided, 1.7, 2.3);
    print(4, "Navier-Stokes Poiseuille (first order; subdivided second order)", o);
    results[4] = o.pass;
  }

  // Every persisted mesh plus the curved group, for the geometric checks.
  std::vector<std::pair<std::string, SimplicialComplex2>> meshes;
  for (auto g : kFourGroups) {
    const auto list = persisted_meshes(primal[g]);
    for (std::size_t k = 0; k < list.size(); ++k) meshes.emplace_back(fmt::format("{} L{}", to_string(g), k), list[k]);
  }
  if (subdivided.error.empty()) {
    const auto list = persisted_meshes(subdivided);
    for (std::size_t k = 0; k < list.size(); ++k) meshes.emplace_back(fmt::format("subdivided L{}", k), list[k]);
  }
  {
    const auto curved = build_mesh_group(MeshGroup::Curved, kLevels, kBaseTriangles, 7);
    for (std::size_t k = 0; k < curved.size(); ++k) meshes.emplace_back(fmt::format("curved L{}", k), curved[k]);
  }

  // ---- 5. signed tiling --------------------------------------------------------------
  {
    Outcome o;
    double worst_cell = 0.0, worst_support = 0.0;
    std::string worst_name;
    for (const auto& [name, m] : meshes) {
      const auto g = compute_dual_metrics(m);
      const double area = sum(g.triangle_area);
      const double cell = std::abs(sum(g.dual_cell_area) - area) / area;
      const double support = std::abs(sum(g.support_area) - area) / area;
      if (cell >= 1e-12 || support >= 1e-12)
        o.check(false, fmt::format("{}: cell {:.2e}, support {:.2e}", name, cell, support));
      if (std::max(cell, support) > std::max(worst_cell, worst_support)) worst_name = name;
      worst_cell = std::max(worst_cell, cell);
      worst_support = std::max(worst_support, support);
    }
    o.check(worst_cell < 1e-12 && worst_support < 1e-12,
            fmt::format("{} meshes: max relative defect cells {:.2e}, supports {:.2e} (worst {}) < 1e-12",
                        meshes.size(), worst_cell, worst_support, worst_name));
    print(5, "signed tiling of dual cells and support areas", o);
    results[5] = o.pass;
  }

  // ---- 6. structural identities ------------------------------------------------------
  ExperimentConfig cond_config;
  cond_config.study = Study::Poisson0Primal;
  cond_config.levels = kLevels;
  cond_config.base_triangles = kBaseTriangles;
  cond_config.condnum = CondNumMode::Estimate;
  cond_config.output_dir = root / "condnum";
  std::vector<CondNumRow> cond;
  std::string cond_error;
  try {
    cond = run_condnum_study(cond_config);
  } catch (const std::exception& e) {
    cond_error = e.what();
  }
  auto finest = [&](MeshGroup g) -> const CondNumRow* {
    const CondNumRow* best = nullptr;
    for (const auto& r : cond)
      if (r.group == g && (!best || r.level > best->level)) best = &r;
    return best;
  };
  {
    Outcome o;
    bool dd = true, sym = true;
    for (const auto& [name, m] : meshes) {
      const auto d = exterior_derivative_matrices(m);
      if ((d.d1 * d.d0).nnz() != 0) dd = false;
      const auto g = compute_dual_metrics(m);
      const auto k = primal0_stiffness(m, g);
      if (!k.is_symmetric(1e-14 * k.max_abs())) sym = false;
    }
    o.check(dd, fmt::format("d1 d0 = 0 exactly on {} meshes", meshes.size()));
    o.check(sym, "(-d0^T) *1 d0 symmetric (1e-14 relative to max entry)");

    for (auto g : kFourGroups) {
      const auto m = read_mesh(primal[g].dir / "meshes" / fmt::format("level{}.off", kLevels - 1));
      const auto metrics = compute_dual_metrics(m);
      const auto f = project_0form(manufactured::cos_cos_laplacian, m, metrics, Placement::PrimalNode);
      const Index pin = central_interior_node(m);
      const double pin_value = manufactured::cos_cos(m.nodes()[pin]);
      try {
        const auto a = solve_poisson_primal0(m, metrics, f, pin, pin_value, Primal0Variant::Standard);
        const auto b = solve_poisson_primal0(m, metrics, f, pin, pin_value, Primal0Variant::Star0Multiplied);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
        o.check(diff <= 1e-9, fmt::format("{} finest: |u_standard - u_star0|_inf = {:.2e} <= 1e-9", to_string(g), diff));
      } catch (const std::exception& e) {
        o.check(false, fmt::format("{} finest: solve failed: {}", to_string(g), e.what()));
      }
    }
    if (!cond_error.empty()) o.check(false, "condition-number study failed: " + cond_error);
    for (auto g : {MeshGroup::Nd1, MeshGroup::Nd5, MeshGroup::Nd15}) {
      const auto* r = finest(g);
      if (!r) continue;
      const double ratio = r->condition_number / r->condition_number_star0;
      o.check(ratio >= 100.0, fmt::format("{} level {}: cond standard {:.3e} / cond star0 {:.3e} = {:.1f} >= 100",
                                          to_string(g), r->level, r->condition_number, r->condition_number_star0,
                                          ratio));
    }
    if (const auto* r = finest(MeshGroup::Delaunay))
      o.details.push_back(fmt::format("     delaunay level {}: cond standard {:.3e}, cond star0 {:.3e} (reference)", r->level,
                                      r->condition_number, r->condition_number_star0));
    print(6, "structural identities and *0-multiplied conditioning", o);
    results[6] = o.pass;
  }

  // ---- 7. condition-number trend -----------------------------------------------------
  {
    Outcome o;
    const auto* nd = finest(MeshGroup::Nd15);
    const auto* del = finest(MeshGroup::Delaunay);
    if (!nd || !del) {
      o.check(false, "condition numbers unavailable: " + cond_error);
    } else {
      for (int k = 0; k < kLevels; ++k) {
        double a = 0, b = 0;
        for (const auto& r : cond) {
          if (r.level != k) continue;
          if (r.group == MeshGroup::Nd15) a = r.condition_number;
          if (r.group == MeshGroup::Delaunay) b = r.condition_number;
        }
        o.details.push_back(fmt::format("     level {}: nd15 {:.3e} / delaunay {:.3e} = {:.1f}", k, a, b, a / b));
      }
      const double ratio = nd->condition_number / del->condition_number;
      o.check(ratio >= 100.0, fmt::format("finest level {}: ratio {:.1f} >= 100", nd->level, ratio));
    }
    print(7, "nd15 vs delaunay condition number", o);
    results[7] = o.pass;
  }

  // ---- 8. distortion statistics ------------------------------------------------------
  {
    Outcome o;
    const std::map<MeshGroup, std::array<double, 3>> bands{{MeshGroup::Nd1, {kNd1Ratio, 0.02, 0.05}},
                                                           {MeshGroup::Nd5, {kNd5Ratio, 0.10, 0.20}},
                                                           {MeshGroup::Nd15, {kNd15Ratio, 0.35, 0.50}}};
    for (const auto& [g, band] : bands) {
      const auto list = persisted_meshes(primal[g]);
      for (std::size_t k = 0; k < list.size(); ++k) {
        const auto q = quality_metrics(list[k]);
        const bool edge_ok = std::abs(q.non_delaunay_edge_ratio - band[0]) <= 0.01;
        const bool tri_ok = q.non_delaunay_triangle_ratio >= band[1] && q.non_delaunay_triangle_ratio <= band[2];
        o.check(edge_ok && tri_ok,
                fmt::format("{} L{}: edge ratio {:.4f} (target {:.2f} +- 0.01), triangle ratio {:.4f} in [{:.2f}, {:.2f}], "
                            "max aspect {:.0f}",
                            to_string(g), k, q.non_delaunay_edge_ratio, band[0], q.non_delaunay_triangle_ratio, band[1],
                            band[2], q.max_aspect_ratio));
      }
    }
    print(8, "non-Delaunay mesh statistics", o);
    results[8] = o.pass;
  }

  // ---- 9. double shear layer ---------------------------------------------------------
  {
    Outcome o;
    ExperimentConfig c;
    c.study = Study::NsShearCurved;
    c.group = MeshGroup::Curved;
    c.shear_cells = kShearCells;
    c.output_dir = root / "shear";
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = run_shear_layer(c);
      const double secs = seconds_since(t0);
      o.details.push_back(fmt::format("     {} triangles, non-Delaunay triangles {:.1f}%, {} steps of {:.3e}, {:.1f} s",
                                      r.triangles, 100 * r.non_delaunay_triangle_ratio, r.steps, r.dt, secs));
      o.check(r.non_delaunay_triangle_ratio >= 0.40 && r.non_delaunay_triangle_ratio <= 0.60,
              fmt::format("mesh non-Delaunay triangle ratio {:.3f} near one half", r.non_delaunay_triangle_ratio));
      o.check(!r.snapshots.empty() && std::abs(r.snapshots.back().time - 0.28) < 1e-12,
              fmt::format("reached T = {:.4f}", r.snapshots.empty() ? 0.0 : r.snapshots.back().time));
      o.check(r.peak_max_vorticity <= 2 * r.initial_max_vorticity,
              fmt::format("max |w| over the run {:.3f} <= 2 x initial {:.3f}", r.peak_max_vorticity,
                          r.initial_max_vorticity));
      if (!r.snapshots.empty()) {
        const auto& last = r.snapshots.back();
        o.check(last.vortices_lower == 4 && last.vortices_upper == 4,
                fmt::format("vortices at T: lower {}, upper {} (expected 4 and 4)", last.vortices_lower,
                            last.vortices_upper));
      }
      o.check(r.max_circulation_drift <= 1e-8,
              fmt::format("max circulation drift {:.2e} (relative to {:.3e}) <= 1e-8", r.max_circulation_drift,
                          r.circulation_scale));
      for (const auto& w : r.warnings) o.details.push_back("     warning: " + w);
    } catch (const std::exception& e) {
      o.check(false, std::string("shear layer failed: ") + e.what());
    }
    print(9, "double shear layer on the curved periodic mesh", o);
    results[9] = o.pass;
  }

  // ---- 10. oracle equivalence --------------------------------------------------------
  {
    Outcome o;
    const auto square = build_complex({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
    const auto quad = build_complex({{0, 0, 0}, {1, 0, 0}, {1.1, 0.9, 0}, {-0.05, 1.05, 0}}, {{0, 1, 2}, {0, 2, 3}});
    auto compare = [&](const std::string& what, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
      const double d = oracle::max_abs_diff(a, b);
      o.check(d <= 1e-12, fmt::format("{}: max difference {:.1e}", what, d));
    };
    for (const auto* mp : {&square, &quad}) {
      const auto& m = *mp;
      const std::string tag = mp == &square ? "square" : "perturbed quad";
      const auto g = compute_dual_metrics(m);
      const auto d = exterior_derivative_matrices(m);
      const oracle::Dense od(m);
      compare(tag + " d0", d.d0.to_dense(), od.d0);
      compare(tag + " d1", d.d1.to_dense(), od.d1);
      compare(tag + " star0", Eigen::VectorXd::Map(g.stars.star0.data(), od.nv).asDiagonal().toDenseMatrix(), od.s0);
      compare(tag + " star1", Eigen::VectorXd::Map(g.stars.star1.data(), od.ne).asDiagonal().toDenseMatrix(), od.s1);
      compare(tag + " star2", Eigen::VectorXd::Map(g.stars.star2.data(), od.nt).asDiagonal().toDenseMatrix(), od.s2);
      compare(tag + " (-d0^T)*1 d0", primal0_stiffness(m, g).to_dense(), od.stiffness());
      compare(tag + " primal 0-form operator", primal0_operator(m, g).to_dense(), od.primal0());

      const auto f = project_0form(manufactured::cos_cos_laplacian, m, g, Placement::PrimalNode);
      const auto u = solve_poisson_primal0(m, g, f, 0, 1.0);
      const Eigen::VectorXd ue =
          oracle::Dense::solve_pinned(od.primal0(), Eigen::VectorXd::Map(f.values.data(), od.nv), 0, 1.0);
      compare(tag + " primal 0-form solve", Eigen::VectorXd::Map(u.values.data(), od.nv), ue);

      const auto exact = project_0form(manufactured::cos_cos, m, g, Placement::PrimalNode);
      double s = 0.0;
      for (int v = 0; v < od.nv; ++v)
        s += g.dual_cell_area[v] * (u.values[v] - exact.values[v]) * (u.values[v] - exact.values[v]);
      o.check(l2_error(u, exact, m, g) == std::sqrt(s), tag + " l2_error equals hand summation exactly");
    }
    // The square's diagonal has a zero dual edge, so the operators dividing by
    // *1 are compared on the perturbed quad.
    const auto g = compute_dual_metrics(quad);
    const oracle::Dense od(quad);
    compare("perturbed quad dual 0-form operator", dual0_operator(quad, g).to_dense(), od.dual0());
    compare("perturbed quad 1-form operator", one_form_operator(quad, g).to_dense(), od.one_form());
    const FormField fd{Placement::DualNode, {2.0, -2.0}};
    const auto ud = solve_poisson_dual0(quad, g, fd, 1, 0.5);
    compare("perturbed quad dual 0-form solve", Eigen::VectorXd::Map(ud.values.data(), 2),
            oracle::Dense::solve_pinned(od.dual0(), Eigen::Vector2d(2.0, -2.0), 1, 0.5));
    print(10, "oracle equivalence on two-triangle meshes", o);
    results[10] = o.pass;
  }

  // ---- 11. brute-force Delaunay ------------------------------------------------------
  {
    Outcome o;
    // Targets are the 2 n^2 counts the generator produces, up to 450 (the next is 512).
    int meshes_checked = 0, failures = 0;
    std::size_t largest = 0;
    for (int target : {2, 8, 18, 32, 50, 72, 128, 200, 288, 392, 450})
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto m = delaunay_unit_square(target, seed);
        ++meshes_checked;
        largest = std::max(largest, m.num_triangles());
        if (!oracle::brute_force_delaunay(m)) ++failures;
      }
    o.check(largest <= 500, fmt::format("largest mesh {} triangles <= 500", largest));
    o.check(failures == 0, fmt::format("{} generated meshes, {} failing the all-pairs check", meshes_checked, failures));
    print(11, "generator output passes the all-pairs empty-circumcircle oracle", o);
    results[11] = o.pass;
  }

  int passed = 0;
  for (const auto& [id, ok] : results) passed += ok;
  fmt::print("acceptance: {}/{} criteria passed\n", passed, results.size());
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
