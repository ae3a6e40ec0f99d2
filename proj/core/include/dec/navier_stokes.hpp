#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dec/dual_geometry.hpp"
#include "dec/forms.hpp"
#include "dec/mesh.hpp"
#include "dec/sparse.hpp"

namespace dec {

// Stream-function formulation on primal nodes. The velocity is the stream
// function gradient rotated 90 degrees counterclockwise, so the dual 1-form
// u = *1 d0 psi is the velocity integrated along dual edges and the vorticity
// *0^{-1}(-d0^T) u approximates the Laplacian of psi.
struct NSState {
  FormField psi{Placement::PrimalNode, {}};
  FormField u_dual{Placement::DualEdge, {}};
  FormField v_primal{Placement::PrimalEdge, {}};  // tangential velocity 1-form
  double time = 0.0;
  double dt = 0.0;
  double nu = 0.0;
  double max_speed = 0.0;  // largest per-triangle reconstructed speed
};

// Dirichlet stream function on boundary nodes and tangential velocity on
// boundary edges, in the order of mesh.boundary_nodes() / boundary_edges().
// Both are empty on boundaryless meshes.
struct NSBoundary {
  std::vector<double> psi;
  std::vector<double> v;
};

struct TangentialReconstruction {
  FormField v{Placement::PrimalEdge, {}};
  std::vector<Point3> triangle_velocity;
  double max_residual = 0.0;  // largest least-squares residual over triangles
};

// Per triangle, the constant in-plane velocity V whose fluxes (n x E_e) . V
// match the primal 1-form `flux` = d0 psi on its three edges in the least
// squares sense; then v_e = V . E_e averaged over the edge's triangles.
// Boundary edges take `boundary_v` when given (boundary_edges() order).
// Throws RankDeficient for a degenerate triangle.
TangentialReconstruction reconstruct_tangential_1form(const SimplicialComplex2& mesh, const FormField& flux,
                                                      const std::vector<double>& boundary_v = {});

// *0^{-1} (-d0^T) u. Boundary contours stay open. Throws ZeroDualVolume.
FormField vorticity(const SimplicialComplex2& mesh, const DualMetrics& metrics, const FormField& u_dual);

// Sum over dual cells of the contour sums (-d0^T) u.
double total_circulation(const SimplicialComplex2& mesh, const FormField& u_dual);
// Sum of their magnitudes, used as the scale for conservation checks.
double circulation_scale(const SimplicialComplex2& mesh, const FormField& u_dual);

// Semi-implicit stream-function solver with the wedge matrix W_v lagged one
// step. Operators that do not depend on the state are assembled once.
class NavierStokesSolver {
 public:
  NavierStokesSolver(const SimplicialComplex2& mesh, const DualMetrics& metrics, NSBoundary bc = {});

  // State from a stream function: u_dual and v_primal are derived from it.
  NSState make_state(std::vector<double> psi, double dt, double nu, double time = 0.0) const;

  // One step of the three-term scheme. Throws solver errors.
  NSState step(const NSState& state) const;

  // Full (#nodes x #nodes) system matrix for the state's W_v, before the
  // Dirichlet elimination.
  SparseMatrix system_matrix(const NSState& state) const;
  // The matrix actually factorized: rows and columns of the fixed nodes
  // (boundary nodes, or one pinned node on a boundaryless mesh) removed.
  SparseMatrix reduced_system_matrix(const NSState& state) const;

  // Vorticity with boundary contours closed by d_b v.
  FormField vorticity(const NSState& state) const;

  // max speed * dt / min edge length.
  double cfl_number(const NSState& state) const;
  std::optional<std::string> cfl_warning(const NSState& state) const;

  const std::vector<Index>& unknown_nodes() const { return unknowns_; }

 private:
  SparseMatrix wedge_advection(const std::vector<double>& v) const;  // (-d0^T)*1 W_v

  const SimplicialComplex2* mesh_;
  const DualMetrics* metrics_;
  NSBoundary bc_;
  SparseMatrix d0_;
  SparseMatrix abs_d0_;
  SparseMatrix neg_d0t_;
  SparseMatrix laplace_;       // (-d0^T)*1 d0
  SparseMatrix mi_laplace_;    // *0^{-1}(-d0^T)*1 d0
  SparseMatrix bilaplace_;     // laplace_ * mi_laplace_
  SparseMatrix closure_;       // d_b
  std::vector<Index> unknowns_;
  std::vector<Index> fixed_;   // boundary nodes, or the pinned node on a torus
  double min_edge_ = 0.0;
};

// Free-function form of NavierStokesSolver::step (assembles the operators).
NSState ns_step(const NSState& state, const SimplicialComplex2& mesh, const DualMetrics& metrics,
                const NSBoundary& bc);

// Poiseuille flow on the unit square: V = (y(1-y), 0) and psi = -(y^2/2 - y^3/3).
namespace poiseuille {
double psi(const Point3& p);
Point3 velocity(const Point3& p);
NSBoundary boundary(const SimplicialComplex2& mesh);

struct SteadyResult {
  NSState state;
  int steps = 0;
  bool converged = false;
  double final_change = 0.0;  // ||psi^{n+1} - psi^n||_inf / dt of the last step
};

// Marches from psi = 0 (exact boundary values) until ||psi^{n+1} - psi^n||_inf / dt
// drops below `tolerance` or `max_steps` is reached. dt is a pseudo time
// step: the steady state does not depend on it.
SteadyResult solve_steady(const SimplicialComplex2& mesh, const DualMetrics& metrics, double nu = 1.0,
                          double dt = 1.0, double tolerance = 1e-10, int max_steps = 200);
}  // namespace poiseuille

}  // namespace dec
