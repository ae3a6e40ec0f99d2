#include "dec/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "dec/errors.hpp"
#include "dec/exterior_derivative.hpp"
#include "dec/forms.hpp"
#include "dec/mesh_gen.hpp"
#include "dec/mesh_io.hpp"
#include "dec/navier_stokes.hpp"
#include "dec/plot.hpp"
#include "dec/poisson.hpp"

namespace dec {

namespace fs = std::filesystem;
namespace mf = manufactured;

namespace {

constexpr std::uint64_t kDistortionSeedStride = 1000003;
constexpr int kMaxTriangleTarget = 1 << 26;

std::string normalize(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '_', '-');
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, value));
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out))
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, value));
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string v = normalize(value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, value));
}

// Empty for NaN so that "not computed" reads as a missing value.
std::string num(double x) { return std::isfinite(x) ? fmt::format("{:.10e}", x) : std::string(); }

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int level_target(int base, int level) {
  long long t = base;
  for (int k = 0; k < level; ++k) t *= 4;
  if (t > kMaxTriangleTarget) throw ConfigError(fmt::format("level {} would need {} triangles", level, t));
  return static_cast<int>(t);
}

double distortion_ratio(MeshGroup g) {
  switch (g) {
    case MeshGroup::Nd1: return kNd1Ratio;
    case MeshGroup::Nd5: return kNd5Ratio;
    case MeshGroup::Nd15: return kNd15Ratio;
    default: return 0.0;
  }
}

void fill_mesh_stats(LevelResult& r, const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  const MeshQuality q = quality_metrics(mesh);
  r.triangles = mesh.num_triangles();
  r.nodes = mesh.num_nodes();
  r.edges = mesh.num_edges();
  r.max_edge_length = q.max_edge_length;
  r.min_edge_length = q.min_edge_length;
  r.min_triangle_area = q.min_triangle_area;
  r.non_delaunay_edge_ratio = q.non_delaunay_edge_ratio;
  r.non_delaunay_triangle_ratio = q.non_delaunay_triangle_ratio;
  r.max_aspect_ratio = q.max_aspect_ratio;
  r.min_dual_edge_length = *std::min_element(metrics.dual_edge_length.begin(), metrics.dual_edge_length.end());
  r.min_dual_cell_area = *std::min_element(metrics.dual_cell_area.begin(), metrics.dual_cell_area.end());
}

void dump_fields(const fs::path* dir, const std::string& tag, const FormField& solution, const FormField& exact) {
  if (!dir) return;
  std::ostringstream a, b;
  write_form_csv(solution, a);
  write_form_csv(exact, b);
  write_file_atomic(*dir / fmt::format("{}_solution.csv", tag), a.str());
  write_file_atomic(*dir / fmt::format("{}_exact.csv", tag), b.str());
}

// Neumann solutions are defined up to a constant. The pin fixes it through a
// single node, whose own discretization error then shifts the whole field;
// matching the weighted mean of the exact solution removes that offset.
void match_mean(FormField& u, const FormField& exact, const std::vector<double>& weights) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    num += weights[i] * (exact.values[i] - u.values[i]);
    den += weights[i];
  }
  for (double& x : u.values) x += num / den;
}

SparseMatrix pinned(const SparseMatrix& a, Index pin) {
  LinearSystem sys{a, std::vector<double>(static_cast<std::size_t>(a.rows()), 0.0), LinearSystem::Pin{pin, 0.0}};
  return apply_pin(sys).matrix;
}

void ensure_convergence_study(Study s) {
  if (s == Study::NsShearCurved) throw ConfigError("ns-shear-curved is not a convergence study; use the shear command");
}

}  // namespace

// ---- names ------------------------------------------------------------------------

std::string_view to_string(Study s) {
  switch (s) {
    case Study::Poisson0Primal: return "poisson0-primal";
    case Study::Poisson0Dual: return "poisson0-dual";
    case Study::Poisson1: return "poisson1";
    case Study::NsPoiseuille: return "ns-poiseuille";
    case Study::NsShearCurved: return "ns-shear-curved";
  }
  return "unknown";
}

std::string_view to_string(MeshGroup g) {
  switch (g) {
    case MeshGroup::Delaunay: return "delaunay";
    case MeshGroup::Nd1: return "nd1";
    case MeshGroup::Nd5: return "nd5";
    case MeshGroup::Nd15: return "nd15";
    case MeshGroup::Subdivided: return "subdivided";
    case MeshGroup::Curved: return "curved";
  }
  return "unknown";
}

std::string_view to_string(CondNumMode m) {
  switch (m) {
    case CondNumMode::Off: return "off";
    case CondNumMode::Dense: return "dense";
    case CondNumMode::Estimate: return "estimate";
  }
  return "unknown";
}

Study parse_study(std::string_view s) {
  const std::string n = normalize(s);
  for (Study v : {Study::Poisson0Primal, Study::Poisson0Dual, Study::Poisson1, Study::NsPoiseuille, Study::NsShearCurved})
    if (n == to_string(v)) return v;
  throw ConfigError(fmt::format("unknown study '{}'", s));
}

MeshGroup parse_mesh_group(std::string_view s) {
  const std::string n = normalize(s);
  for (MeshGroup v : {MeshGroup::Delaunay, MeshGroup::Nd1, MeshGroup::Nd5, MeshGroup::Nd15, MeshGroup::Subdivided,
                      MeshGroup::Curved})
    if (n == to_string(v)) return v;
  throw ConfigError(fmt::format("unknown mesh group '{}'", s));
}

CondNumMode parse_condnum_mode(std::string_view s) {
  const std::string n = normalize(s);
  for (CondNumMode v : {CondNumMode::Off, CondNumMode::Dense, CondNumMode::Estimate})
    if (n == to_string(v)) return v;
  throw ConfigError(fmt::format("unknown condnum mode '{}'", s));
}

// ---- config -----------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (levels < 2 || levels > 8) throw ConfigError(fmt::format("levels must be in [2, 8], got {}", levels));
  if (base_triangles < 8) throw ConfigError(fmt::format("base_triangles must be at least 8, got {}", base_triangles));
  level_target(base_triangles, levels - 1);
  if (group == MeshGroup::Curved && study != Study::NsShearCurved)
    throw ConfigError("the curved group is only valid with the ns-shear-curved study");
  if (study == Study::NsShearCurved && group != MeshGroup::Curved)
    throw ConfigError("the ns-shear-curved study runs on the curved group");
  if (shear_cells < 4) throw ConfigError(fmt::format("shear_cells must be at least 4, got {}", shear_cells));
  if (!(shear_end_time > 0.0)) throw ConfigError("shear_end_time must be positive");
  for (double t : snapshot_times)
    if (t < 0.0 || t > shear_end_time + 1e-12)
      throw ConfigError(fmt::format("snapshot time {} outside [0, {}]", t, shear_end_time));
}

void set_config_value(ExperimentConfig& config, std::string_view key_in, std::string_view value_in) {
  std::string key(trim(key_in));
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string_view value = trim(value_in);
  if (key == "study") {
    config.study = parse_study(value);
  } else if (key == "group" || key == "mesh_group") {
    config.group = parse_mesh_group(value);
  } else if (key == "levels") {
    config.levels = parse_integer<int>(key, value);
  } else if (key == "seed") {
    config.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "output_dir" || key == "out") {
    if (value.empty()) throw ConfigError("output_dir must not be empty");
    config.output_dir = fs::path(std::string(value));
  } else if (key == "condnum" || key == "condnum_mode") {
    config.condnum = parse_condnum_mode(value);
  } else if (key == "base_triangles") {
    config.base_triangles = parse_integer<int>(key, value);
  } else if (key == "write_fields") {
    config.write_fields = parse_bool(key, value);
  } else if (key == "shear_cells") {
    config.shear_cells = parse_integer<int>(key, value);
  } else if (key == "shear_end_time") {
    config.shear_end_time = parse_double(key, value);
  } else if (key == "snapshot_times") {
    config.snapshot_times.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      config.snapshot_times.push_back(parse_double(key, trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  } else {
    throw ConfigError(fmt::format("unknown configuration key '{}'", key_in));
  }
}

void load_config(ExperimentConfig& config, std::istream& in) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected key=value", number));
    try {
      set_config_value(config, s.substr(0, eq), s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", number, e.what()));
    }
  }
}

void load_config_file(ExperimentConfig& config, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  load_config(config, in);
}

// ---- meshes -------------------------------------------------------------------------

SimplicialComplex2 curved_periodic_mesh(int cells) {
  return periodic_identify(lift_sinusoidal(structured_grid(cells)));
}

SimplicialComplex2 build_group_level(MeshGroup group, int level, int base_triangles, std::uint64_t seed) {
  const int target = level_target(base_triangles, level);
  switch (group) {
    case MeshGroup::Delaunay: return delaunay_unit_square(target, seed);
    case MeshGroup::Nd1:
    case MeshGroup::Nd5:
    case MeshGroup::Nd15: {
      DistortionSpec spec;
      spec.target_edge_ratio = distortion_ratio(group);
      spec.rng_seed = seed * kDistortionSeedStride + static_cast<std::uint64_t>(level);
      return distort_to_non_delaunay(delaunay_unit_square(target, seed), spec);
    }
    case MeshGroup::Subdivided: {
      SimplicialComplex2 mesh = delaunay_unit_square(base_triangles, seed);
      for (int k = 0; k < level; ++k) mesh = midpoint_subdivide(mesh);
      return mesh;
    }
    case MeshGroup::Curved: {
      const int cells = std::max(2, static_cast<int>(std::lround(std::sqrt(target / 2.0))));
      return curved_periodic_mesh(cells);
    }
  }
  throw ConfigError("unknown mesh group");
}

std::vector<SimplicialComplex2> build_mesh_group(MeshGroup group, int levels, int base_triangles, std::uint64_t seed) {
  std::vector<SimplicialComplex2> out;
  out.reserve(static_cast<std::size_t>(std::max(levels, 0)));
  for (int k = 0; k < levels; ++k) {
    if (group == MeshGroup::Subdivided && k > 0) {
      out.push_back(midpoint_subdivide(out.back()));
    } else {
      out.push_back(build_group_level(group, k, base_triangles, seed));
    }
  }
  return out;
}

// ---- convergence ---------------------------------------------------------------------

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    lx.push_back(std::log10(x[i]));
    ly.push_back(std::log10(y[i]));
  }
  SlopeFit fit;
  const auto n = static_cast<double>(lx.size());
  if (lx.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / den;
  const double c = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.slope * lx[i] + c);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

SparseMatrix star0_multiplied_matrix(const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  return pinned(primal0_stiffness(mesh, metrics), central_interior_node(mesh));
}

SparseMatrix study_matrix(Study study, const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  switch (study) {
    case Study::Poisson0Primal: return pinned(primal0_operator(mesh, metrics), central_interior_node(mesh));
    case Study::Poisson0Dual: return pinned(dual0_operator(mesh, metrics), central_triangle(metrics));
    case Study::Poisson1: return one_form_reduced_operator(mesh, metrics);
    case Study::NsPoiseuille: {
      const auto steady = poiseuille::solve_steady(mesh, metrics);
      const NavierStokesSolver solver(mesh, metrics, poiseuille::boundary(mesh));
      return solver.reduced_system_matrix(steady.state);
    }
    case Study::NsShearCurved: break;
  }
  ensure_convergence_study(study);
  return {};
}

double condition_number(const SparseMatrix& a, CondNumMode mode) {
  switch (mode) {
    case CondNumMode::Off: return kNotComputed;
    case CondNumMode::Dense:
      // Large matrices fall back to the estimator; dense SVD cost is cubic.
      return condition_number(a, a.rows() <= kDenseSvdMaxRows ? CondMode::DenseSvd : CondMode::Estimate);
    case CondNumMode::Estimate: return condition_number(a, CondMode::Estimate);
  }
  return kNotComputed;
}

LevelResult run_study_level(Study study, const SimplicialComplex2& mesh, CondNumMode condnum, const fs::path* fields_dir,
                            const std::string& tag) {
  ensure_convergence_study(study);
  const auto t0 = std::chrono::steady_clock::now();
  const DualMetrics metrics = compute_dual_metrics(mesh);
  LevelResult r;
  fill_mesh_stats(r, mesh, metrics);

  switch (study) {
    case Study::Poisson0Primal: {
      const auto f = project_0form(mf::cos_cos_laplacian, mesh, metrics, Placement::PrimalNode);
      const auto exact = project_0form(mf::cos_cos, mesh, metrics, Placement::PrimalNode);
      const Index pin = central_interior_node(mesh);
      auto u = solve_poisson_primal0(mesh, metrics, f, pin, exact.values[pin]);
      match_mean(u, exact, metrics.dual_cell_area);
      r.l2_error = l2_error(u, exact, mesh, metrics);
      dump_fields(fields_dir, tag, u, exact);
      break;
    }
    case Study::Poisson0Dual: {
      const auto f = project_0form(mf::cos_cos_laplacian, mesh, metrics, Placement::DualNode);
      const auto exact = project_0form(mf::cos_cos, mesh, metrics, Placement::DualNode);
      const Index pin = central_triangle(metrics);
      auto u = solve_poisson_dual0(mesh, metrics, f, pin, exact.values[pin]);
      match_mean(u, exact, metrics.triangle_area);
      r.l2_error = l2_error(u, exact, mesh, metrics);
      r.l2_error_piecewise_constant = l2_error_piecewise_constant(u, mf::cos_cos, mesh, metrics);
      dump_fields(fields_dir, tag, u, exact);
      break;
    }
    case Study::Poisson1: {
      const auto f = project_1form(mf::poly_1form_laplacian, mesh);
      const auto exact = project_1form(mf::poly_1form, mesh);
      const std::vector<double> g(mesh.boundary_edges().size(), 0.0);
      const auto u = solve_poisson_1form(mesh, metrics, f, g);
      r.l2_error = l2_error(u, exact, mesh, metrics);
      dump_fields(fields_dir, tag, u, exact);
      break;
    }
    case Study::NsPoiseuille: {
      const auto steady = poiseuille::solve_steady(mesh, metrics);
      if (!steady.converged)
        throw NumericalError(fmt::format("Poiseuille flow did not reach steady state in {} steps (change {:.3e})",
                                         steady.steps, steady.final_change));
      const auto exact = project_1form(poiseuille::velocity, mesh);
      r.l2_error = l2_error(steady.state.v_primal, exact, mesh, metrics);
      r.time_steps = steady.steps;
      dump_fields(fields_dir, tag, steady.state.v_primal, exact);
      if (condnum != CondNumMode::Off) {
        const NavierStokesSolver solver(mesh, metrics, poiseuille::boundary(mesh));
        r.condition_number = condition_number(solver.reduced_system_matrix(steady.state), condnum);
      }
      break;
    }
    case Study::NsShearCurved: break;
  }
  if (condnum != CondNumMode::Off && study != Study::NsPoiseuille)
    r.condition_number = condition_number(study_matrix(study, mesh, metrics), condnum);
  r.seconds = seconds_since(t0);
  return r;
}

void write_report_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "level,triangles,nodes,edges,max_edge_length,min_edge_length,min_dual_edge_length,min_triangle_area,"
         "min_dual_cell_area,l2_error,l2_error_piecewise_constant,condition_number,non_delaunay_edge_ratio,"
         "non_delaunay_triangle_ratio,max_aspect_ratio,time_steps,status\n";
  for (const auto& r : report.rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.level, r.triangles, r.nodes, r.edges,
                       num(r.max_edge_length), num(r.min_edge_length), num(r.min_dual_edge_length),
                       num(r.min_triangle_area), num(r.min_dual_cell_area), num(r.l2_error),
                       num(r.l2_error_piecewise_constant), num(r.condition_number), num(r.non_delaunay_edge_ratio),
                       num(r.non_delaunay_triangle_ratio), num(r.max_aspect_ratio), r.time_steps, csv_safe(r.status));
  }
}

namespace {

void write_convergence_outputs(const ExperimentConfig& config, ConvergenceReport& report) {
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const LevelResult& a, const LevelResult& b) { return a.max_edge_length > b.max_edge_length; });
  std::vector<double> h, e, e_pc;
  for (const auto& r : report.rows) {
    if (r.status != "ok") continue;
    h.push_back(r.max_edge_length);
    e.push_back(r.l2_error);
    e_pc.push_back(r.l2_error_piecewise_constant);
  }
  report.fit = fit_loglog_slope(h, e);
  report.fit_piecewise_constant = fit_loglog_slope(h, e_pc);

  std::ostringstream csv;
  write_report_csv(report, csv);
  write_file_atomic(config.output_dir / "report.csv", csv.str());

  std::string summary =
      "study,group,levels,slope,slope_residual,slope_piecewise_constant,slope_piecewise_constant_residual,status\n";
  summary += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(report.study), to_string(report.group), config.levels,
                         num(report.fit.slope), num(report.fit.residual), num(report.fit_piecewise_constant.slope),
                         num(report.fit_piecewise_constant.residual),
                         report.failure ? "failed: " + csv_safe(*report.failure) : std::string("ok"));
  write_file_atomic(config.output_dir / "summary.csv", summary);

  LogLogPlot plot;
  plot.title = fmt::format("{} / {} (slope {:.2f})", to_string(report.study), to_string(report.group), report.fit.slope);
  plot.x_label = "max primal edge length";
  plot.y_label = "L2 error";
  plot.series.push_back({"L2 error", h, e});
  if (report.study == Study::Poisson0Dual) plot.series.push_back({"piecewise-constant L2 error", h, e_pc});
  write_file_atomic(config.output_dir / "loglog.svg", render_loglog_svg(plot));
}

}  // namespace

ConvergenceReport run_convergence(const ExperimentConfig& config) {
  config.validate();
  ensure_convergence_study(config.study);
  const fs::path mesh_dir = config.output_dir / "meshes";
  const fs::path field_dir = config.output_dir / "fields";
  fs::create_directories(mesh_dir);
  if (config.write_fields) fs::create_directories(field_dir);

  ConvergenceReport report;
  report.study = config.study;
  report.group = config.group;
  std::optional<SimplicialComplex2> previous;
  for (int k = 0; k < config.levels; ++k) {
    const std::string tag = fmt::format("level{}", k);
    try {
      SimplicialComplex2 mesh = (config.group == MeshGroup::Subdivided && previous)
                                    ? midpoint_subdivide(*previous)
                                    : build_group_level(config.group, k, config.base_triangles, config.seed);
      write_mesh(mesh, mesh_dir / (tag + ".off"));
      LevelResult r = run_study_level(config.study, mesh, config.condnum, config.write_fields ? &field_dir : nullptr, tag);
      r.level = k;
      report.rows.push_back(std::move(r));
      previous = std::move(mesh);
    } catch (const std::exception& e) {
      LevelResult failed;
      failed.level = k;
      failed.l2_error = kNotComputed;
      failed.status = std::string("failed: ") + e.what();
      report.rows.push_back(failed);
      report.failure = e.what();
      write_convergence_outputs(config, report);
      throw;
    }
  }
  write_convergence_outputs(config, report);
  return report;
}

// ---- condition numbers -------------------------------------------------------------

std::vector<CondNumRow> run_condnum_study(const ExperimentConfig& config) {
  config.validate();
  ensure_convergence_study(config.study);
  if (config.condnum == CondNumMode::Off) throw ConfigError("condnum mode is off; choose dense or estimate");
  fs::create_directories(config.output_dir / "meshes");

  std::vector<CondNumRow> rows;
  for (MeshGroup group : {MeshGroup::Delaunay, MeshGroup::Nd1, MeshGroup::Nd5, MeshGroup::Nd15}) {
    for (int k = 0; k < config.levels; ++k) {
      const SimplicialComplex2 mesh = build_group_level(group, k, config.base_triangles, config.seed);
      write_mesh(mesh, config.output_dir / "meshes" / fmt::format("{}_level{}.off", to_string(group), k));
      const DualMetrics metrics = compute_dual_metrics(mesh);
      const MeshQuality q = quality_metrics(mesh);
      const SparseMatrix a = study_matrix(config.study, mesh, metrics);
      CondNumRow row;
      row.group = group;
      row.level = k;
      row.triangles = mesh.num_triangles();
      row.unknowns = a.rows();
      row.max_edge_length = q.max_edge_length;
      row.min_edge_length = q.min_edge_length;
      row.condition_number = condition_number(a, config.condnum);
      if (config.study == Study::Poisson0Primal)
        row.condition_number_star0 = condition_number(star0_multiplied_matrix(mesh, metrics), config.condnum);
      rows.push_back(row);
    }
  }

  std::string csv =
      "group,level,triangles,unknowns,max_edge_length,min_edge_length,condition_number,condition_number_star0\n";
  LogLogPlot plot;
  plot.title = fmt::format("{} condition numbers", to_string(config.study));
  plot.x_label = "min primal edge length";
  plot.y_label = "condition number";
  plot.guide_slopes = {-2.0};
  for (const auto& r : rows) {
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(r.group), r.level, r.triangles, r.unknowns,
                       num(r.max_edge_length), num(r.min_edge_length), num(r.condition_number),
                       num(r.condition_number_star0));
    auto series_for = [&](const std::string& label) -> PlotSeries& {
      for (auto& s : plot.series)
        if (s.label == label) return s;
      plot.series.push_back({label, {}, {}});
      return plot.series.back();
    };
    auto& s = series_for(std::string(to_string(r.group)));
    s.x.push_back(r.min_edge_length);
    s.y.push_back(r.condition_number);
    if (std::isfinite(r.condition_number_star0)) {
      auto& s0 = series_for(fmt::format("{} (*0 multiplied)", to_string(r.group)));
      s0.x.push_back(r.min_edge_length);
      s0.y.push_back(r.condition_number_star0);
    }
  }
  write_file_atomic(config.output_dir / "condnum.csv", csv);
  write_file_atomic(config.output_dir / "condnum.svg", render_loglog_svg(plot));
  return rows;
}

// ---- double shear layer -------------------------------------------------------------

Point3 shear_layer_velocity(const Point3& p) {
  const double y = p.y() - std::floor(p.y());
  const double ux = y <= 0.5 ? std::tanh((y - 0.25) / kShearRho) : std::tanh((0.75 - y) / kShearRho);
  return {ux, 0.0, 0.0};
}

int count_vortices(const SimplicialComplex2& mesh, std::span<const double> vorticity, bool upper_half,
                   double min_relative_size) {
  if (vorticity.size() != mesh.num_nodes()) throw DimensionMismatch("vorticity needs one value per node");
  double peak = 0.0;
  for (double w : vorticity) peak = std::max(peak, std::abs(w));
  if (peak == 0.0) return 0;
  const auto inside = [&](Index v) {
    const double y = mesh.nodes()[v].y();
    return (upper_half ? y >= 0.5 : y < 0.5) && std::abs(vorticity[v]) > 0.5 * peak;
  };
  std::vector<std::vector<Index>> adjacency(mesh.num_nodes());
  for (const auto& e : mesh.edges()) {
    adjacency[e[0]].push_back(e[1]);
    adjacency[e[1]].push_back(e[0]);
  }
  std::vector<std::uint8_t> seen(mesh.num_nodes(), 0);
  std::vector<std::size_t> sizes;
  std::vector<Index> stack;
  for (Index v = 0; v < static_cast<Index>(mesh.num_nodes()); ++v) {
    if (seen[v] || !inside(v)) continue;
    std::size_t size = 0;
    seen[v] = 1;
    stack.push_back(v);
    while (!stack.empty()) {
      const Index a = stack.back();
      stack.pop_back();
      ++size;
      for (Index b : adjacency[a])
        if (!seen[b] && inside(b)) {
          seen[b] = 1;
          stack.push_back(b);
        }
    }
    sizes.push_back(size);
  }
  if (sizes.empty()) return 0;
  const double largest = static_cast<double>(*std::max_element(sizes.begin(), sizes.end()));
  return static_cast<int>(std::count_if(sizes.begin(), sizes.end(), [&](std::size_t s) {
    return static_cast<double>(s) >= min_relative_size * largest;
  }));
}

ShearLayerResult run_shear_layer(const ExperimentConfig& config) {
  config.validate();
  if (config.study != Study::NsShearCurved) throw ConfigError("run_shear_layer needs the ns-shear-curved study");
  fs::create_directories(config.output_dir);

  const SimplicialComplex2 mesh = curved_periodic_mesh(config.shear_cells);
  write_mesh(mesh, config.output_dir / "curved.off");
  const DualMetrics metrics = compute_dual_metrics(mesh);
  const MeshQuality quality = quality_metrics(mesh);

  ShearLayerResult result;
  result.triangles = mesh.num_triangles();
  result.non_delaunay_triangle_ratio = quality.non_delaunay_triangle_ratio;

  // psi from the circulation of the projected velocity: (-d0^T)*1 d0 psi = (-d0^T) u0.
  const FormField u0 = project_dual_flux(shear_layer_velocity, mesh, metrics);
  const auto d = exterior_derivative_matrices(mesh);
  std::vector<double> rhs = spmv_transpose(d.d0, u0.values);
  for (double& x : rhs) x = -x;
  const auto psi0 = solve(LinearSystem{primal0_stiffness(mesh, metrics), rhs, LinearSystem::Pin{0, 0.0}});

  const NavierStokesSolver solver(mesh, metrics);
  NSState state = solver.make_state(psi0, 1.0, 0.0);
  const double dt0 = 0.25 * quality.min_edge_length / std::max(1.0, state.max_speed);
  result.steps = static_cast<int>(std::ceil(config.shear_end_time / dt0 - 1e-9));
  result.dt = config.shear_end_time / result.steps;
  state = solver.make_state(psi0, result.dt, 0.0);

  const double c0 = total_circulation(mesh, state.u_dual);
  result.circulation_scale = circulation_scale(mesh, state.u_dual);

  std::vector<int> snapshot_steps;
  for (double t : config.snapshot_times) snapshot_steps.push_back(static_cast<int>(std::lround(t / result.dt)));

  auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  auto record = [&](int step) {
    const FormField w = solver.vorticity(state);
    const double peak = max_abs(w.values);
    if (step == 0) result.initial_max_vorticity = peak;
    result.peak_max_vorticity = std::max(result.peak_max_vorticity, peak);
    const double c = total_circulation(mesh, state.u_dual);
    result.max_circulation_drift =
        std::max(result.max_circulation_drift, std::abs(c - c0) / std::max(result.circulation_scale, 1e-300));
    for (std::size_t i = 0; i < snapshot_steps.size(); ++i) {
      if (snapshot_steps[i] != step) continue;
      ShearSnapshot snap;
      snap.time = config.snapshot_times[i];
      snap.max_vorticity = peak;
      snap.vortices_lower = count_vortices(mesh, w.values, false);
      snap.vortices_upper = count_vortices(mesh, w.values, true);
      snap.total_circulation = c;
      result.snapshots.push_back(snap);
      std::ostringstream out;
      write_form_csv(w, out);
      write_file_atomic(config.output_dir / fmt::format("vorticity_t{:.3f}.csv", snap.time), out.str());
    }
  };

  record(0);
  for (int n = 1; n <= result.steps; ++n) {
    state = solver.step(state);
    if (auto warn = solver.cfl_warning(state); warn && result.warnings.empty())
      result.warnings.push_back(fmt::format("step {}: {}", n, *warn));
    record(n);
  }

  std::string summary = "time,max_vorticity,vortices_lower,vortices_upper,total_circulation\n";
  for (const auto& s : result.snapshots)
    summary += fmt::format("{:.6f},{},{},{},{}\n", s.time, num(s.max_vorticity), s.vortices_lower, s.vortices_upper,
                           num(s.total_circulation));
  write_file_atomic(config.output_dir / "shear_summary.csv", summary);
  std::string info = "key,value\n";
  info += fmt::format("triangles,{}\n", result.triangles);
  info += fmt::format("non_delaunay_triangle_ratio,{}\n", num(result.non_delaunay_triangle_ratio));
  info += fmt::format("dt,{}\nsteps,{}\n", num(result.dt), result.steps);
  info += fmt::format("initial_max_vorticity,{}\npeak_max_vorticity,{}\n", num(result.initial_max_vorticity),
                      num(result.peak_max_vorticity));
  info += fmt::format("circulation_scale,{}\nmax_circulation_drift,{}\n", num(result.circulation_scale),
                      num(result.max_circulation_drift));
  write_file_atomic(config.output_dir / "shear_info.csv", info);
  return result;
}

}  // namespace dec
