#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dec/dual_geometry.hpp"
#include "dec/linalg.hpp"
#include "dec/mesh.hpp"

namespace dec {

enum class Study { Poisson0Primal, Poisson0Dual, Poisson1, NsPoiseuille, NsShearCurved };
enum class MeshGroup { Delaunay, Nd1, Nd5, Nd15, Subdivided, Curved };
enum class CondNumMode { Off, Dense, Estimate };

// Names use '-' ("poisson0-primal"); parsing also accepts '_'. Throw ConfigError.
std::string_view to_string(Study s);
std::string_view to_string(MeshGroup g);
std::string_view to_string(CondNumMode m);
Study parse_study(std::string_view s);
MeshGroup parse_mesh_group(std::string_view s);
CondNumMode parse_condnum_mode(std::string_view s);

struct ExperimentConfig {
  Study study = Study::Poisson0Primal;
  MeshGroup group = MeshGroup::Delaunay;
  int levels = 5;
  std::uint64_t seed = 7;
  std::filesystem::path output_dir = "runs";
  CondNumMode condnum = CondNumMode::Off;
  int base_triangles = 128;  // level k targets base_triangles * 4^k
  bool write_fields = true;  // per-level solution CSV dumps

  // Double shear layer.
  int shear_cells = 64;  // structured cells per side before lifting
  double shear_end_time = 0.28;
  std::vector<double> snapshot_times{0.0, 0.14, 0.28};

  // Throws ConfigError on violated invariants.
  void validate() const;
};

// Applies one key=value setting. Keys: study, group, levels, seed, output_dir
// (alias out), condnum, base_triangles, write_fields, shear_cells,
// shear_end_time, snapshot_times (comma separated). Throws ConfigError.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

// Flat key=value file; '#' starts a comment, blank lines are ignored.
// Throws ConfigError (with the line number) or std::runtime_error on I/O.
void load_config(ExperimentConfig& config, std::istream& in);
void load_config_file(ExperimentConfig& config, const std::filesystem::path& path);

// ---- mesh groups -------------------------------------------------------------------

inline constexpr double kNd1Ratio = 0.01, kNd5Ratio = 0.05, kNd15Ratio = 0.15;

// Structured grid of `cells` per side lifted onto z = 0.1 sin(4 pi x) cos(4 pi y)
// with opposite sides identified (a torus).
SimplicialComplex2 curved_periodic_mesh(int cells);

// Level k of the group: Delaunay meshes with base * 4^k triangles (distorted
// for the nd groups), the base mesh subdivided k times, or for the curved
// group a structured grid with about base * 4^k triangles.
SimplicialComplex2 build_group_level(MeshGroup group, int level, int base_triangles, std::uint64_t seed);
std::vector<SimplicialComplex2> build_mesh_group(MeshGroup group, int levels, int base_triangles, std::uint64_t seed);

// ---- convergence ---------------------------------------------------------------------

inline constexpr double kNotComputed = std::numeric_limits<double>::quiet_NaN();

struct LevelResult {
  int level = 0;
  std::size_t triangles = 0, nodes = 0, edges = 0;
  double max_edge_length = 0.0;
  double min_edge_length = 0.0;
  double min_dual_edge_length = 0.0;  // signed
  double min_triangle_area = 0.0;
  double min_dual_cell_area = 0.0;  // signed
  double l2_error = 0.0;
  double l2_error_piecewise_constant = kNotComputed;  // dual 0-form study only
  double condition_number = kNotComputed;             // NaN when not computed
  double non_delaunay_edge_ratio = 0.0;
  double non_delaunay_triangle_ratio = 0.0;
  double max_aspect_ratio = 0.0;
  int time_steps = 0;  // Navier-Stokes only
  double seconds = 0.0;  // wall time, not written to report.csv
  std::string status = "ok";
};

struct SlopeFit {
  double slope = kNotComputed;
  double residual = kNotComputed;  // RMS of log10 residuals
};

// Least-squares fit of log(y) = slope * log(x) + c over the usable points.
SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct ConvergenceReport {
  Study study{};
  MeshGroup group{};
  std::vector<LevelResult> rows;  // decreasing max edge length
  SlopeFit fit;                   // l2_error vs max_edge_length
  SlopeFit fit_piecewise_constant;
  std::optional<std::string> failure;
};

// Solves the study's manufactured problem on one mesh. With `fields_dir` set
// the solution and exact projection are written there as CSV.
LevelResult run_study_level(Study study, const SimplicialComplex2& mesh, CondNumMode condnum,
                            const std::filesystem::path* fields_dir = nullptr, const std::string& tag = "");

// The matrix whose condition number the study reports: the pinned standard
// operator for the 0-form studies, the interior-edge operator for the 1-form
// study and the reduced system at steady state for Poiseuille flow.
SparseMatrix study_matrix(Study study, const SimplicialComplex2& mesh, const DualMetrics& metrics);
// (-d0^T) *1 d0 with the same pin, the *0-multiplied primal system.
SparseMatrix star0_multiplied_matrix(const SimplicialComplex2& mesh, const DualMetrics& metrics);
double condition_number(const SparseMatrix& a, CondNumMode mode);

// Runs every level, writes report.csv, summary.csv, loglog.svg and the meshes
// under config.output_dir. On failure the partial report (with a failure
// row) is flushed and the exception rethrown.
ConvergenceReport run_convergence(const ExperimentConfig& config);

void write_report_csv(const ConvergenceReport& report, std::ostream& out);

// ---- condition numbers -------------------------------------------------------------

struct CondNumRow {
  MeshGroup group{};
  int level = 0;
  std::size_t triangles = 0;
  Index unknowns = 0;
  double max_edge_length = 0.0;
  double min_edge_length = 0.0;
  double condition_number = 0.0;
  double condition_number_star0 = kNotComputed;  // primal study only
};

// Condition numbers for every level of delaunay, nd1, nd5 and nd15 (the
// groups the stiffness comparison is about). Writes condnum.csv and
// condnum.svg. Throws ConfigError when config.condnum is Off.
std::vector<CondNumRow> run_condnum_study(const ExperimentConfig& config);

// ---- double shear layer -------------------------------------------------------------

inline constexpr double kShearRho = 1.0 / 30.0;
Point3 shear_layer_velocity(const Point3& p);

// Vortex count in the lower (y < 0.5) or upper half: connected node sets
// where |w| exceeds half of max |w| over the whole mesh, ignoring components
// with fewer than `min_relative_size` times the largest component's nodes.
int count_vortices(const SimplicialComplex2& mesh, std::span<const double> vorticity, bool upper_half,
                   double min_relative_size = 0.2);

struct ShearSnapshot {
  double time = 0.0;
  double max_vorticity = 0.0;
  int vortices_lower = 0;
  int vortices_upper = 0;
  double total_circulation = 0.0;
};

struct ShearLayerResult {
  std::size_t triangles = 0;
  double non_delaunay_triangle_ratio = 0.0;
  double dt = 0.0;
  int steps = 0;
  double initial_max_vorticity = 0.0;
  double peak_max_vorticity = 0.0;  // over every step
  double circulation_scale = 0.0;   // sum of |cell circulation| at t = 0
  double max_circulation_drift = 0.0;  // max |C(t) - C(0)| / scale over every step
  std::vector<ShearSnapshot> snapshots;
  std::vector<std::string> warnings;
};

// Inviscid run on the curved periodic mesh; writes the mesh, vorticity
// snapshots (vorticity_t<time>.csv) and shear_summary.csv.
ShearLayerResult run_shear_layer(const ExperimentConfig& config);

}  // namespace dec
