#include "dec/navier_stokes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <fmt/format.h>

#include "dec/errors.hpp"
#include "dec/exterior_derivative.hpp"
#include "dec/linalg.hpp"

namespace dec {

TangentialReconstruction reconstruct_tangential_1form(const SimplicialComplex2& mesh, const FormField& flux,
                                                      const std::vector<double>& boundary_v) {
  check_form(mesh, flux, Placement::PrimalEdge);
  const auto& bedges = mesh.boundary_edges();
  if (!boundary_v.empty() && boundary_v.size() != bedges.size())
    throw DimensionMismatch("boundary tangential velocity needs one value per boundary edge");

  const auto nt = static_cast<Index>(mesh.num_triangles());
  TangentialReconstruction out;
  out.triangle_velocity.resize(nt);
  out.v.values.assign(mesh.num_edges(), 0.0);
  std::vector<int> count(mesh.num_edges(), 0);

  for (Index t = 0; t < nt; ++t) {
    const auto p = mesh.triangle_points(t);
    const Point3 n = mesh.triangle_normal(t);
    const Point3 b1 = (p[1] - p[0]).normalized();
    const Point3 b2 = n.cross(b1);
    const auto& te = mesh.triangle_edges(t);
    const auto& ts = mesh.triangle_edge_signs(t);
    Eigen::Matrix<double, 3, 2> m;
    Eigen::Vector3d rhs;
    std::array<Point3, 3> edge_vec;
    for (int i = 0; i < 3; ++i) {
      edge_vec[i] = ts[i] * (p[(i + 1) % 3] - p[i]);  // canonical a -> b
      const Point3 row = n.cross(edge_vec[i]);
      m(i, 0) = row.dot(b1);
      m(i, 1) = row.dot(b2);
      rhs(i) = flux.values[te[i]];
    }
    const auto qr = m.colPivHouseholderQr();
    if (qr.rank() < 2) throw RankDeficient(fmt::format("triangle {} cannot carry a tangent velocity", t));
    const Eigen::Vector2d c = qr.solve(rhs);
    out.max_residual = std::max(out.max_residual, (m * c - rhs).norm());
    const Point3 vel = c(0) * b1 + c(1) * b2;
    out.triangle_velocity[t] = vel;
    for (int i = 0; i < 3; ++i) {
      out.v.values[te[i]] += vel.dot(edge_vec[i]);
      ++count[te[i]];
    }
  }
  for (std::size_t e = 0; e < out.v.values.size(); ++e) out.v.values[e] /= count[e];
  if (!boundary_v.empty())
    for (std::size_t j = 0; j < bedges.size(); ++j) out.v.values[bedges[j]] = boundary_v[j];
  return out;
}

FormField vorticity(const SimplicialComplex2& mesh, const DualMetrics& metrics, const FormField& u_dual) {
  check_form(mesh, u_dual, Placement::DualEdge);
  require_invertible(metrics, StarKind::Star0);
  const auto d = exterior_derivative_matrices(mesh);
  auto w = spmv_transpose(d.d0, u_dual.values);
  for (std::size_t v = 0; v < w.size(); ++v) w[v] *= -metrics.stars.star0_inv[v];
  return {Placement::PrimalNode, std::move(w)};
}

double total_circulation(const SimplicialComplex2& mesh, const FormField& u_dual) {
  check_form(mesh, u_dual, Placement::DualEdge);
  const auto d = exterior_derivative_matrices(mesh);
  const auto w = spmv_transpose(d.d0, u_dual.values);
  double s = 0.0;
  for (double x : w) s -= x;
  return s;
}

double circulation_scale(const SimplicialComplex2& mesh, const FormField& u_dual) {
  check_form(mesh, u_dual, Placement::DualEdge);
  const auto d = exterior_derivative_matrices(mesh);
  const auto w = spmv_transpose(d.d0, u_dual.values);
  double s = 0.0;
  for (double x : w) s += std::abs(x);
  return s;
}

NavierStokesSolver::NavierStokesSolver(const SimplicialComplex2& mesh, const DualMetrics& metrics, NSBoundary bc)
    : mesh_(&mesh), metrics_(&metrics), bc_(std::move(bc)) {
  require_invertible(metrics, StarKind::Star0);
  const auto& bnodes = mesh.boundary_nodes();
  const auto& bedges = mesh.boundary_edges();
  if (bc_.psi.size() != bnodes.size()) throw DimensionMismatch("boundary psi needs one value per boundary node");
  if (bc_.v.size() != bedges.size()) throw DimensionMismatch("boundary v needs one value per boundary edge");

  d0_ = exterior_derivative_matrices(mesh).d0;
  std::vector<Triplet> abs_trip;
  abs_trip.reserve(d0_.nnz());
  for (Index e = 0; e < d0_.rows(); ++e)
    for (Index c : d0_.row_cols(e)) abs_trip.push_back({e, c, 1.0});
  abs_d0_ = SparseMatrix::from_triplets(d0_.rows(), d0_.cols(), std::move(abs_trip));
  neg_d0t_ = scaled(d0_.transpose(), -1.0);
  laplace_ = neg_d0t_ * diagonal_scale(metrics.stars.star1, d0_, {});
  mi_laplace_ = diagonal_scale(metrics.stars.star0_inv, laplace_, {});
  bilaplace_ = laplace_ * mi_laplace_;
  closure_ = boundary_closure_matrix(mesh);

  if (bnodes.empty()) {
    fixed_ = {0};
  } else {
    fixed_ = bnodes;
  }
  std::vector<std::uint8_t> is_fixed(mesh.num_nodes(), 0);
  for (Index v : fixed_) is_fixed[v] = 1;
  for (Index v = 0; v < static_cast<Index>(mesh.num_nodes()); ++v)
    if (!is_fixed[v]) unknowns_.push_back(v);

  min_edge_ = *std::min_element(metrics.primal_edge_length.begin(), metrics.primal_edge_length.end());
}

NSState NavierStokesSolver::make_state(std::vector<double> psi, double dt, double nu, double time) const {
  if (psi.size() != mesh_->num_nodes()) throw DimensionMismatch("psi needs one value per node");
  NSState s;
  s.psi.values = std::move(psi);
  s.dt = dt;
  s.nu = nu;
  s.time = time;
  FormField flux{Placement::PrimalEdge, spmv(d0_, s.psi.values)};
  s.u_dual.values.resize(flux.values.size());
  for (std::size_t e = 0; e < flux.values.size(); ++e) s.u_dual.values[e] = metrics_->stars.star1[e] * flux.values[e];
  auto rec = reconstruct_tangential_1form(*mesh_, flux, bc_.v);
  s.v_primal = std::move(rec.v);
  for (const auto& vel : rec.triangle_velocity) s.max_speed = std::max(s.max_speed, vel.norm());
  return s;
}

SparseMatrix NavierStokesSolver::wedge_advection(const std::vector<double>& v) const {
  // (W_v w)[e=(a,b)] = v_e (w_a + w_b) / 2, then (-d0^T) *1.
  std::vector<double> weight(v.size());
  for (std::size_t e = 0; e < v.size(); ++e) weight[e] = 0.5 * metrics_->stars.star1[e] * v[e];
  return neg_d0t_ * diagonal_scale(weight, abs_d0_, {});
}

SparseMatrix NavierStokesSolver::system_matrix(const NSState& state) const {
  const SparseMatrix advect = wedge_advection(state.v_primal.values) * mi_laplace_;
  return add(add(laplace_, bilaplace_, 1.0 / state.dt, -state.nu), advect);
}

SparseMatrix NavierStokesSolver::reduced_system_matrix(const NSState& state) const {
  return system_matrix(state).submatrix(unknowns_, unknowns_);
}

NSState NavierStokesSolver::step(const NSState& state) const {
  const SparseMatrix kw = wedge_advection(state.v_primal.values);
  const SparseMatrix a = add(add(laplace_, bilaplace_, 1.0 / state.dt, -state.nu), kw * mi_laplace_);

  auto rhs = spmv(laplace_, state.psi.values);
  for (double& x : rhs) x /= state.dt;
  if (!bc_.v.empty()) {
    auto closed = spmv(closure_, bc_.v);
    for (std::size_t v = 0; v < closed.size(); ++v) closed[v] *= metrics_->stars.star0_inv[v];
    const auto visc = spmv(laplace_, closed);
    const auto adv = spmv(kw, closed);
    for (std::size_t v = 0; v < rhs.size(); ++v) rhs[v] += state.nu * visc[v] - adv[v];
  }

  // Known values: boundary data, or the current value at the pinned node.
  std::vector<double> known(mesh_->num_nodes(), 0.0);
  const bool torus = mesh_->boundary_nodes().empty();
  if (torus) {
    known[fixed_[0]] = state.psi.values[fixed_[0]];
  } else {
    for (std::size_t j = 0; j < fixed_.size(); ++j) known[fixed_[j]] = bc_.psi[j];
  }
  const auto shift = spmv(a, known);

  LinearSystem sys;
  sys.matrix = a.submatrix(unknowns_, unknowns_);
  sys.rhs.reserve(unknowns_.size());
  for (Index v : unknowns_) sys.rhs.push_back(rhs[v] - shift[v]);
  const auto x = solve(sys);

  std::vector<double> psi = known;
  for (std::size_t k = 0; k < unknowns_.size(); ++k) psi[unknowns_[k]] = x[k];
  return make_state(std::move(psi), state.dt, state.nu, state.time + state.dt);
}

FormField NavierStokesSolver::vorticity(const NSState& state) const {
  auto w = spmv(laplace_, state.psi.values);
  if (!bc_.v.empty()) {
    const auto closed = spmv(closure_, bc_.v);
    for (std::size_t v = 0; v < w.size(); ++v) w[v] += closed[v];
  }
  for (std::size_t v = 0; v < w.size(); ++v) w[v] *= metrics_->stars.star0_inv[v];
  return {Placement::PrimalNode, std::move(w)};
}

double NavierStokesSolver::cfl_number(const NSState& state) const { return state.max_speed * state.dt / min_edge_; }

std::optional<std::string> NavierStokesSolver::cfl_warning(const NSState& state) const {
  const double c = cfl_number(state);
  if (c <= 1.0) return std::nullopt;
  return fmt::format("CFL number {:.3g} exceeds 1 (max speed {:.3g}, dt {:.3g}, min edge {:.3g})", c,
                     state.max_speed, state.dt, min_edge_);
}

NSState ns_step(const NSState& state, const SimplicialComplex2& mesh, const DualMetrics& metrics,
                const NSBoundary& bc) {
  return NavierStokesSolver(mesh, metrics, bc).step(state);
}

namespace poiseuille {

double psi(const Point3& p) {
  const double y = p.y();
  return -(0.5 * y * y - y * y * y / 3.0);
}

Point3 velocity(const Point3& p) { return {p.y() * (1.0 - p.y()), 0.0, 0.0}; }

NSBoundary boundary(const SimplicialComplex2& mesh) {
  NSBoundary bc;
  for (Index v : mesh.boundary_nodes()) bc.psi.push_back(psi(mesh.nodes()[v]));
  // Walls are no-slip and the parabolic inflow/outflow is normal to the
  // vertical sides, so every boundary edge has zero tangential velocity.
  bc.v.assign(mesh.boundary_edges().size(), 0.0);
  return bc;
}

SteadyResult solve_steady(const SimplicialComplex2& mesh, const DualMetrics& metrics, double nu, double dt,
                          double tolerance, int max_steps) {
  const NSBoundary bc = boundary(mesh);
  const NavierStokesSolver solver(mesh, metrics, bc);
  std::vector<double> psi0(mesh.num_nodes(), 0.0);
  const auto& bnodes = mesh.boundary_nodes();
  for (std::size_t j = 0; j < bnodes.size(); ++j) psi0[bnodes[j]] = bc.psi[j];

  SteadyResult out;
  out.state = solver.make_state(std::move(psi0), dt, nu);
  while (out.steps < max_steps) {
    NSState next = solver.step(out.state);
    double change = 0.0;
    for (std::size_t v = 0; v < next.psi.values.size(); ++v)
      change = std::max(change, std::abs(next.psi.values[v] - out.state.psi.values[v]));
    out.state = std::move(next);
    ++out.steps;
    out.final_change = change / dt;
    if (out.final_change < tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace poiseuille

}  // namespace dec
