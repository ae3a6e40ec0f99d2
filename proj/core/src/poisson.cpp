#include "dec/poisson.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "dec/errors.hpp"
#include "dec/exterior_derivative.hpp"

namespace dec {

namespace {

constexpr double kPi = std::numbers::pi;

// *1^{-1} with entries of the given edges required to be finite; the rest fall
// back to zero when the dual edge vanishes.
std::vector<double> star1_inverse(const SimplicialComplex2& mesh, const DualMetrics& metrics, bool interior_only) {
  std::vector<double> inv = metrics.stars.star1_inv;
  for (Index e = 0; e < static_cast<Index>(inv.size()); ++e) {
    if (std::isfinite(inv[e])) continue;
    if (interior_only && mesh.is_boundary_edge(e)) {
      inv[e] = 0.0;
      continue;
    }
    throw ZeroDualVolume(fmt::format("dual edge of edge {} has signed length {:.3e}; preprocess the mesh", e,
                                     metrics.dual_edge_length[e]));
  }
  return inv;
}

std::vector<Index> interior_edges(const SimplicialComplex2& mesh) {
  std::vector<Index> out;
  out.reserve(mesh.num_edges() - mesh.boundary_edges().size());
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e)
    if (!mesh.is_boundary_edge(e)) out.push_back(e);
  return out;
}

}  // namespace

SparseMatrix primal0_stiffness(const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  const auto d = exterior_derivative_matrices(mesh);
  const SparseMatrix star1_d0 = diagonal_scale(metrics.stars.star1, d.d0, {});
  return scaled(d.d0.transpose() * star1_d0, -1.0);
}

SparseMatrix primal0_operator(const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  require_invertible(metrics, StarKind::Star0);
  return diagonal_scale(metrics.stars.star0_inv, primal0_stiffness(mesh, metrics), {});
}

SparseMatrix dual0_operator(const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  const auto d = exterior_derivative_matrices(mesh);
  const auto inv = star1_inverse(mesh, metrics, true);
  std::vector<double> keep(mesh.num_edges(), 1.0);
  for (Index e : mesh.boundary_edges()) keep[e] = 0.0;
  const SparseMatrix d1_interior = diagonal_scale({}, d.d1, keep);
  std::vector<double> neg_star2(metrics.stars.star2.size());
  for (std::size_t t = 0; t < neg_star2.size(); ++t) neg_star2[t] = -metrics.stars.star2[t];
  const SparseMatrix left = diagonal_scale(neg_star2, d1_interior, inv);
  return left * d.d1.transpose();
}

SparseMatrix one_form_operator(const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  require_invertible(metrics, StarKind::Star0);
  const auto d = exterior_derivative_matrices(mesh);
  const auto inv1 = star1_inverse(mesh, metrics, true);
  const SparseMatrix d0t = d.d0.transpose();
  // d0 *0^{-1} (-d0^T) *1
  const SparseMatrix grad_div =
      scaled(diagonal_scale({}, d.d0, metrics.stars.star0_inv) * diagonal_scale({}, d0t, metrics.stars.star1), -1.0);
  // *1^{-1} d1^T *2 d1
  const SparseMatrix curl_curl =
      diagonal_scale(inv1, d.d1.transpose(), metrics.stars.star2) * d.d1;
  return grad_div - curl_curl;
}

SparseMatrix one_form_reduced_operator(const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  const auto keep = interior_edges(mesh);
  return one_form_operator(mesh, metrics).submatrix(keep, keep);
}

FormField solve_poisson_primal0(const SimplicialComplex2& mesh, const DualMetrics& metrics, const FormField& f,
                                Index pin_node, double pin_value, Primal0Variant variant) {
  check_form(mesh, f, Placement::PrimalNode);
  if (pin_node < 0 || pin_node >= static_cast<Index>(mesh.num_nodes())) throw DimensionMismatch("pin node out of range");
  LinearSystem sys;
  if (variant == Primal0Variant::Standard) {
    sys.matrix = primal0_operator(mesh, metrics);
    sys.rhs = f.values;
  } else {
    sys.matrix = primal0_stiffness(mesh, metrics);
    sys.rhs.resize(f.values.size());
    for (std::size_t v = 0; v < f.values.size(); ++v) sys.rhs[v] = metrics.stars.star0[v] * f.values[v];
  }
  sys.pinned = LinearSystem::Pin{pin_node, pin_value};
  return {Placement::PrimalNode, solve(sys)};
}

FormField solve_poisson_dual0(const SimplicialComplex2& mesh, const DualMetrics& metrics, const FormField& f,
                              Index pin_cell, double pin_value) {
  check_form(mesh, f, Placement::DualNode);
  if (pin_cell < 0 || pin_cell >= static_cast<Index>(mesh.num_triangles()))
    throw DimensionMismatch("pin cell out of range");
  LinearSystem sys{dual0_operator(mesh, metrics), f.values, LinearSystem::Pin{pin_cell, pin_value}};
  return {Placement::DualNode, solve(sys)};
}

FormField solve_poisson_1form(const SimplicialComplex2& mesh, const DualMetrics& metrics, const FormField& f,
                              const std::vector<double>& g, const std::vector<double>& h) {
  check_form(mesh, f, Placement::PrimalEdge);
  const auto& bedges = mesh.boundary_edges();
  if (g.size() != bedges.size()) throw DimensionMismatch("g needs one value per boundary edge");
  if (!h.empty() && h.size() != bedges.size()) throw DimensionMismatch("h needs one value per boundary edge");

  const SparseMatrix a = one_form_operator(mesh, metrics);
  std::vector<double> rhs = f.values;
  if (!h.empty()) {
    // f - d0 *0^{-1} d_b h
    const auto d = exterior_derivative_matrices(mesh);
    auto nodal = spmv(boundary_closure_matrix(mesh), h);
    for (std::size_t v = 0; v < nodal.size(); ++v) nodal[v] *= metrics.stars.star0_inv[v];
    const auto corr = spmv(d.d0, nodal);
    for (std::size_t e = 0; e < rhs.size(); ++e) rhs[e] -= corr[e];
  }
  // Move the known boundary columns to the right-hand side.
  std::vector<double> boundary_full(mesh.num_edges(), 0.0);
  for (std::size_t j = 0; j < bedges.size(); ++j) boundary_full[bedges[j]] = g[j];
  const auto shift = spmv(a, boundary_full);
  for (std::size_t e = 0; e < rhs.size(); ++e) rhs[e] -= shift[e];

  const auto keep = interior_edges(mesh);
  LinearSystem sys;
  sys.matrix = a.submatrix(keep, keep);
  sys.rhs.reserve(keep.size());
  for (Index e : keep) sys.rhs.push_back(rhs[e]);

  FormField u{Placement::PrimalEdge, boundary_full};
  if (!keep.empty()) {
    const auto x = solve(sys);
    for (std::size_t k = 0; k < keep.size(); ++k) u.values[keep[k]] = x[k];
  }
  return u;
}

Index central_interior_node(const SimplicialComplex2& mesh) {
  Index best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index v = 0; v < static_cast<Index>(mesh.num_nodes()); ++v) {
    if (mesh.is_boundary_node(v)) continue;
    const auto& p = mesh.nodes()[v];
    const double d = std::hypot(p.x() - 0.5, p.y() - 0.5);
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  if (best < 0) throw InvalidMesh("mesh has no interior node");
  return best;
}

Index central_triangle(const DualMetrics& metrics) {
  Index best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index t = 0; t < static_cast<Index>(metrics.circumcenters.size()); ++t) {
    const auto& c = metrics.circumcenters[t];
    const double d = std::hypot(c.x() - 0.5, c.y() - 0.5);
    if (d < best_d) {
      best_d = d;
      best = t;
    }
  }
  if (best < 0) throw InvalidMesh("mesh has no triangles");
  return best;
}

namespace manufactured {

double cos_cos(const Point3& p) { return std::cos(kPi * p.x()) * std::cos(kPi * p.y()); }

double cos_cos_laplacian(const Point3& p) { return -2.0 * kPi * kPi * cos_cos(p); }

Point3 poly_1form(const Point3& p) {
  const double x = p.x(), y = p.y();
  const double bx = x * (1.0 - x), by = y * (1.0 - y);
  return {bx * by * y * (1.0 - y), by * bx * x * (1.0 - x), 0.0};
}

Point3 poly_1form_laplacian(const Point3& p) {
  const double x = p.x(), y = p.y();
  const double sx = x * x - x, sy = y * y - y;
  return {-2.0 * (sx * (6.0 * y * y - 6.0 * y + 1.0) + sy * sy),
          -2.0 * (sy * (6.0 * x * x - 6.0 * x + 1.0) + sx * sx), 0.0};
}

}  // namespace manufactured

}  // namespace dec
