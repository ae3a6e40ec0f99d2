// Command-line front end: mesh generation, single solves, convergence and
// condition-number studies, and the double shear layer.
//
// Exit codes: 0 success, 1 usage or input error, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dec/dual_geometry.hpp"
#include "dec/errors.hpp"
#include "dec/experiment.hpp"
#include "dec/mesh_gen.hpp"
#include "dec/mesh_io.hpp"
#include "dec/sparse.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

void print_quality(const dec::SimplicialComplex2& mesh) {
  const auto q = dec::quality_metrics(mesh);
  fmt::print("triangles {}  nodes {}  edges {}\n", mesh.num_triangles(), mesh.num_nodes(), mesh.num_edges());
  fmt::print("max aspect ratio {:.4g}  non-Delaunay edges {:.4f}  non-Delaunay triangles {:.4f}\n",
             q.max_aspect_ratio, q.non_delaunay_edge_ratio, q.non_delaunay_triangle_ratio);
  fmt::print("edge length [{:.4e}, {:.4e}]  min triangle area {:.4e}\n", q.min_edge_length, q.max_edge_length,
             q.min_triangle_area);
}

// Options shared by the study commands. Every value is kept as text and fed
// through set_config_value so flags and config files follow the same rules.
struct StudyFlags {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> values;

  void add(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values.emplace_back(key, v); }, help);
  }

  dec::ExperimentConfig resolve(dec::ExperimentConfig config) const {
    if (!config_file.empty()) dec::load_config_file(config, config_file);
    for (const auto& [k, v] : values) dec::set_config_value(config, k, v);
    return config;
  }
};

void add_common_study_flags(CLI::App* cmd, StudyFlags& flags) {
  cmd->add_option("--config", flags.config_file, "key=value configuration file (flags override it)");
  flags.add(cmd, "--study", "study", "poisson0-primal | poisson0-dual | poisson1 | ns-poiseuille");
  flags.add(cmd, "--group", "group", "delaunay | nd1 | nd5 | nd15 | subdivided");
  flags.add(cmd, "--levels", "levels", "number of refinement levels in [2, 8] (default 5)");
  flags.add(cmd, "--seed", "seed", "random seed for mesh generation (default 7)");
  flags.add(cmd, "--out", "output_dir", "output directory (default runs)");
  flags.add(cmd, "--base-triangles", "base_triangles", "triangles at level 0; level k has 4^k times more (default 128)");
  flags.add(cmd, "--condnum", "condnum", "off | dense | estimate (default off)");
}

void print_report(const dec::ConvergenceReport& report) {
  fmt::print("{:>5} {:>9} {:>12} {:>12} {:>12} {:>12} {:>8}\n", "level", "triangles", "max_edge", "l2_error", "l2_pc",
             "cond", "seconds");
  for (const auto& r : report.rows)
    fmt::print("{:>5} {:>9} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>8.2f}\n", r.level, r.triangles,
               r.max_edge_length, r.l2_error, r.l2_error_piecewise_constant, r.condition_number, r.seconds);
  fmt::print("slope {:.4f} (fit residual {:.3e})\n", report.fit.slope, report.fit.residual);
  if (std::isfinite(report.fit_piecewise_constant.slope))
    fmt::print("piecewise-constant slope {:.4f} (fit residual {:.3e})\n", report.fit_piecewise_constant.slope,
               report.fit_piecewise_constant.residual);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete exterior calculus solvers on signed circumcentric duals"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a unit-square mesh");
  std::string gen_kind = "delaunay", gen_out, gen_dual;
  int gen_triangles = 128, gen_cells = 8;
  std::uint64_t gen_seed = 7;
  gen->add_option("--kind", gen_kind, "delaunay (jittered points) or grid (structured)")
      ->check(CLI::IsMember({"delaunay", "grid"}));
  gen->add_option("--triangles", gen_triangles, "target triangle count for --kind delaunay")->check(CLI::Range(2, 1 << 26));
  gen->add_option("--cells", gen_cells, "cells per side for --kind grid")->check(CLI::Range(1, 1 << 13));
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output OFF file")->required();
  gen->add_option("--dual-volumes", gen_dual, "also write signed dual volumes as CSV");

  // distort
  auto* distort = app.add_subcommand("distort", "Make a Delaunay mesh non-Delaunay by moving apexes");
  std::string dist_in, dist_out;
  dec::DistortionSpec dist_spec;
  distort->add_option("--in", dist_in, "input OFF file")->required();
  distort->add_option("--out", dist_out, "output OFF file")->required();
  distort->add_option("--ratio", dist_spec.target_edge_ratio, "target non-Delaunay edge ratio in [0, 0.99]")
      ->required()
      ->check(CLI::Range(0.0, 0.99));
  distort->add_option("--seed", dist_spec.rng_seed, "random seed");
  distort->add_option("--max-aspect", dist_spec.max_aspect_ratio, "reject moves above this aspect ratio (default 500)");

  // subdivide
  auto* subdivide = app.add_subcommand("subdivide", "Midpoint-subdivide a mesh");
  std::string sub_in, sub_out;
  int sub_times = 1;
  subdivide->add_option("--in", sub_in, "input OFF file")->required();
  subdivide->add_option("--out", sub_out, "output OFF file")->required();
  subdivide->add_option("--times", sub_times, "number of subdivisions")->check(CLI::Range(1, 8));

  // lift
  auto* lift = app.add_subcommand("lift", "Lift onto z = 0.1 sin(4 pi x) cos(4 pi y)");
  std::string lift_in, lift_out;
  bool lift_periodic = false;
  lift->add_option("--in", lift_in, "input OFF file (unit square)")->required();
  lift->add_option("--out", lift_out, "output OFF file")->required();
  lift->add_flag("--periodic", lift_periodic, "identify opposite sides after lifting");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one study's manufactured problem on a given mesh");
  std::string solve_study, solve_mesh, solve_out = ".", solve_matrix, solve_cond = "off";
  solve->add_option("--study", solve_study, "poisson0-primal | poisson0-dual | poisson1 | ns-poiseuille")->required();
  solve->add_option("--mesh", solve_mesh, "input OFF file (unit square)")->required();
  solve->add_option("--out", solve_out, "directory for the solution and exact CSV fields");
  solve->add_option("--export-matrix", solve_matrix, "write the factorized matrix in Matrix Market format");
  solve->add_option("--condnum", solve_cond, "off | dense | estimate");

  // converge / condnum / shear
  auto* converge = app.add_subcommand("converge", "Convergence study over a mesh group");
  StudyFlags converge_flags;
  add_common_study_flags(converge, converge_flags);
  converge_flags.add(converge, "--write-fields", "write_fields", "write per-level solution CSV files (default true)");

  auto* condnum = app.add_subcommand("condnum", "Condition numbers over delaunay, nd1, nd5 and nd15");
  StudyFlags condnum_flags;
  add_common_study_flags(condnum, condnum_flags);

  auto* shear = app.add_subcommand("shear", "Inviscid double shear layer on the curved periodic mesh");
  StudyFlags shear_flags;
  shear->add_option("--config", shear_flags.config_file, "key=value configuration file (flags override it)");
  shear_flags.add(shear, "--cells", "shear_cells", "structured cells per side (default 64)");
  shear_flags.add(shear, "--end-time", "shear_end_time", "final time (default 0.28)");
  shear_flags.add(shear, "--snapshots", "snapshot_times", "comma-separated snapshot times (default 0,0.14,0.28)");
  shear_flags.add(shear, "--out", "output_dir", "output directory (default runs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (const auto* sub : app.get_subcommands()) failing = sub;
    std::cerr << failing->help();
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const auto mesh = gen_kind == "grid" ? dec::structured_grid(gen_cells) : dec::delaunay_unit_square(gen_triangles, gen_seed);
      dec::write_mesh(mesh, gen_out);
      if (!gen_dual.empty()) {
        std::ostringstream out;
        dec::write_dual_volumes_csv(mesh, dec::compute_dual_metrics(mesh), out);
        dec::write_file_atomic(gen_dual, out.str());
      }
      print_quality(mesh);
    } else if (distort->parsed()) {
      const auto mesh = dec::distort_to_non_delaunay(dec::read_mesh(dist_in), dist_spec);
      dec::write_mesh(mesh, dist_out);
      print_quality(mesh);
    } else if (subdivide->parsed()) {
      auto mesh = dec::read_mesh(sub_in);
      for (int k = 0; k < sub_times; ++k) mesh = dec::midpoint_subdivide(mesh);
      dec::write_mesh(mesh, sub_out);
      print_quality(mesh);
    } else if (lift->parsed()) {
      auto mesh = dec::lift_sinusoidal(dec::read_mesh(lift_in));
      if (lift_periodic) mesh = dec::periodic_identify(mesh);
      dec::write_mesh(mesh, lift_out);
      print_quality(mesh);
    } else if (solve->parsed()) {
      const dec::Study study = dec::parse_study(solve_study);
      const auto mode = dec::parse_condnum_mode(solve_cond);
      const auto mesh = dec::read_mesh(solve_mesh);
      const std::filesystem::path out_dir = solve_out;
      std::filesystem::create_directories(out_dir);
      const auto r = dec::run_study_level(study, mesh, mode, &out_dir, std::string(dec::to_string(study)));
      if (!solve_matrix.empty())
        dec::write_matrix_market(dec::study_matrix(study, mesh, dec::compute_dual_metrics(mesh)), solve_matrix);
      fmt::print("{} on {} triangles: L2 error {:.6e}", dec::to_string(study), r.triangles, r.l2_error);
      if (std::isfinite(r.condition_number)) fmt::print(", condition number {:.4e}", r.condition_number);
      fmt::print(" ({:.2f} s)\n", r.seconds);
    } else if (converge->parsed()) {
      const auto config = converge_flags.resolve({});
      print_report(dec::run_convergence(config));
      fmt::print("wrote {}\n", (config.output_dir / "report.csv").string());
    } else if (condnum->parsed()) {
      const auto config = condnum_flags.resolve({});
      if (config.condnum == dec::CondNumMode::Off) {
        std::cerr << "error: condnum needs --condnum dense or --condnum estimate\n\n" << condnum->help();
        return kExitUsage;
      }
      for (const auto& r : dec::run_condnum_study(config))
        fmt::print("{:>8} level {} triangles {:>7}  cond {:.4e}  cond*0 {:.4e}\n", dec::to_string(r.group), r.level,
                   r.triangles, r.condition_number, r.condition_number_star0);
      fmt::print("wrote {}\n", (config.output_dir / "condnum.csv").string());
    } else if (shear->parsed()) {
      dec::ExperimentConfig base;
      base.study = dec::Study::NsShearCurved;
      base.group = dec::MeshGroup::Curved;
      const auto config = shear_flags.resolve(base);
      const auto r = dec::run_shear_layer(config);
      fmt::print("curved periodic mesh: {} triangles, non-Delaunay triangle ratio {:.3f}\n", r.triangles,
                 r.non_delaunay_triangle_ratio);
      fmt::print("{} steps of dt {:.4e}\n", r.steps, r.dt);
      for (const auto& s : r.snapshots)
        fmt::print("t = {:.3f}: max |w| {:.4f}, vortices {} (lower) {} (upper), circulation {:.3e}\n", s.time,
                   s.max_vorticity, s.vortices_lower, s.vortices_upper, s.total_circulation);
      fmt::print("peak max |w| {:.4f} (initial {:.4f}); max relative circulation drift {:.3e}\n",
                 r.peak_max_vorticity, r.initial_max_vorticity, r.max_circulation_drift);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    }
  } catch (const dec::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dec::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const dec::GenerationFailed& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const dec::TargetUnreachable& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
