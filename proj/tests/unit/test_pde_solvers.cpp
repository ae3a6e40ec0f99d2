#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dec/dual_geometry.hpp"
#include "dec/errors.hpp"
#include "dec/experiment.hpp"
#include "dec/forms.hpp"
#include "dec/mesh_gen.hpp"
#include "dec/navier_stokes.hpp"
#include "dec/poisson.hpp"
#include "support/dense_oracle.hpp"

using namespace dec;
using std::numbers::pi;

namespace {

SimplicialComplex2 perturbed_quad() {
  return build_complex({{0, 0, 0}, {1, 0, 0}, {1.1, 0.9, 0}, {-0.05, 1.05, 0}}, {{0, 1, 2}, {0, 2, 3}});
}

}  // namespace

TEST_CASE("operators match dense brute-force assembly") {
  const auto m = perturbed_quad();
  const auto g = compute_dual_metrics(m);
  const oracle::Dense o(m);
  CHECK(oracle::max_abs_diff(primal0_stiffness(m, g).to_dense(), o.stiffness()) < 1e-12);
  CHECK(oracle::max_abs_diff(primal0_operator(m, g).to_dense(), o.primal0()) < 1e-12);
  CHECK(oracle::max_abs_diff(dual0_operator(m, g).to_dense(), o.dual0()) < 1e-12);
  CHECK(oracle::max_abs_diff(one_form_operator(m, g).to_dense(), o.one_form()) < 1e-12);
}

TEST_CASE("projections") {
  const auto m = build_complex({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  const auto g = compute_dual_metrics(m);
  const auto u = project_0form(manufactured::cos_cos, m, g, Placement::PrimalNode);
  CHECK(u.values[0] == doctest::Approx(1.0));
  const auto ud = project_0form(manufactured::cos_cos, m, g, Placement::DualNode);
  CHECK(std::abs(ud.values[0]) < 1e-15);
  CHECK(std::abs(manufactured::cos_cos_laplacian({0.5, 0.5, 0})) < 1e-14);
  CHECK(manufactured::cos_cos_laplacian({0, 0, 0}) == doctest::Approx(-2 * pi * pi));

  Index e01 = -1;
  for (std::size_t e = 0; e < m.num_edges(); ++e)
    if (m.edges()[e] == Edge{0, 1}) e01 = static_cast<Index>(e);
  const auto fy = project_1form([](const Point3& p) { return Point3(p.y(), 0, 0); }, m);
  CHECK(std::abs(fy.values[e01]) < 1e-15);
  const auto fx = project_1form([](const Point3& p) { return Point3(p.x(), 0, 0); }, m);
  CHECK(fx.values[e01] == doctest::Approx(0.5));

  const auto sq = delaunay_unit_square(128, 1);
  const auto poly = project_1form(manufactured::poly_1form, sq);
  for (Index e : sq.boundary_edges()) CHECK(std::abs(poly.values[e]) < 1e-15);
}

TEST_CASE("trivial Poisson problems") {
  const auto m = delaunay_unit_square(200, 4);
  const auto g = compute_dual_metrics(m);
  const Index pin = central_interior_node(m);
  const auto u = solve_poisson_primal0(m, g, {Placement::PrimalNode, std::vector<double>(m.num_nodes(), 0.0)}, pin, 3.0);
  for (double x : u.values) CHECK(x == doctest::Approx(3.0).epsilon(1e-12));

  const auto w = solve_poisson_dual0(m, g, {Placement::DualNode, std::vector<double>(m.num_triangles(), 0.0)},
                                     central_triangle(g), -1.0);
  for (double x : w.values) CHECK(x == doctest::Approx(-1.0).epsilon(1e-12));

  const auto z = solve_poisson_1form(m, g, {Placement::PrimalEdge, std::vector<double>(m.num_edges(), 0.0)},
                                     std::vector<double>(m.boundary_edges().size(), 0.0));
  for (double x : z.values) CHECK(std::abs(x) < 1e-12);
}

TEST_CASE("two-triangle solves match dense solves") {
  const auto m = perturbed_quad();
  const auto g = compute_dual_metrics(m);
  const oracle::Dense o(m);

  SUBCASE("primal 0-form, both variants") {
    const auto f = project_0form(manufactured::cos_cos_laplacian, m, g, Placement::PrimalNode);
    const Eigen::Map<const Eigen::VectorXd> fv(f.values.data(), 4);
    const Eigen::VectorXd ue = oracle::Dense::solve_pinned(o.primal0(), fv, 1, 0.5);
    const auto u = solve_poisson_primal0(m, g, f, 1, 0.5);
    const auto u0 = solve_poisson_primal0(m, g, f, 1, 0.5, Primal0Variant::Star0Multiplied);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(u.values[i] - ue(i)) < 1e-12);
      CHECK(std::abs(u0.values[i] - ue(i)) < 1e-12);
    }
  }
  SUBCASE("dual 0-form") {
    const FormField f{Placement::DualNode, {1.0, -1.0}};
    const Eigen::VectorXd ue = oracle::Dense::solve_pinned(o.dual0(), Eigen::Vector2d(1.0, -1.0), 0, 2.0);
    const auto u = solve_poisson_dual0(m, g, f, 0, 2.0);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(u.values[i] - ue(i)) < 1e-12);
  }
  SUBCASE("1-form: one interior edge, 1x1 reduced system") {
    CHECK(one_form_reduced_operator(m, g).rows() == 1);
    std::vector<double> f(5, 0.0), gb;
    for (int e = 0; e < 5; ++e) f[e] = 0.3 * e - 0.2;
    for (Index e : m.boundary_edges()) gb.push_back(0.1 * (e + 1));
    const auto u = solve_poisson_1form(m, g, {Placement::PrimalEdge, f}, gb);
    // Dense elimination of the boundary columns.
    const Eigen::MatrixXd a = o.one_form();
    int interior = -1;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(5);
    for (std::size_t j = 0; j < gb.size(); ++j) full(m.boundary_edges()[j]) = gb[j];
    for (int e = 0; e < 5; ++e)
      if (!m.is_boundary_edge(e)) interior = e;
    const double rhs = f[interior] - a.row(interior).dot(full);
    const double x = rhs / a(interior, interior);
    CHECK(std::abs(u.values[interior] - x) < 1e-12);
    for (std::size_t j = 0; j < gb.size(); ++j) CHECK(u.values[m.boundary_edges()[j]] == gb[j]);
  }
}

TEST_CASE("l2 error matches hand summation") {
  const auto m = perturbed_quad();
  const auto g = compute_dual_metrics(m);
  const FormField a{Placement::PrimalNode, {1.0, 2.0, 3.0, 4.0}}, b{Placement::PrimalNode, {1.5, 2.0, 2.0, 4.25}};
  double s = 0.0;
  for (int v = 0; v < 4; ++v) s += g.dual_cell_area[v] * (a.values[v] - b.values[v]) * (a.values[v] - b.values[v]);
  CHECK(l2_error(a, b, m, g) == std::sqrt(s));

  const FormField ea{Placement::PrimalEdge, {0.1, 0.2, 0.3, 0.4, 0.5}}, eb{Placement::PrimalEdge, {0, 0, 0, 0, 0}};
  double se = 0.0;
  for (int e = 0; e < 5; ++e) {
    const double d = ea.values[e] / g.primal_edge_length[e];
    se += g.support_area[e] * d * d;
  }
  CHECK(l2_error(ea, eb, m, g) == std::sqrt(se));
  CHECK_THROWS_AS(l2_error(a, ea, m, g), PlacementMismatch);
}

TEST_CASE("tangential reconstruction") {
  SUBCASE("uniform flow is exact") {
    const auto m = delaunay_unit_square(128, 5);
    // psi = y gives V = (-1, 0); d0 psi integrates grad psi along edges.
    std::vector<double> flux(m.num_edges());
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
      const auto [a, b] = m.edges()[e];
      flux[e] = m.nodes()[b].y() - m.nodes()[a].y();
    }
    const auto r = reconstruct_tangential_1form(m, {Placement::PrimalEdge, flux});
    CHECK(r.max_residual < 1e-12);
    for (const auto& v : r.triangle_velocity) {
      CHECK(v.x() == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(std::abs(v.y()) < 1e-12);
    }
  }
  SUBCASE("velocity stays in the plane of curved triangles") {
    const auto m = curved_periodic_mesh(8);
    std::vector<double> flux(m.num_edges());
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
      const auto p = m.edge_points(static_cast<Index>(e));
      flux[e] = 0.3 * (p[1].x() - p[0].x()) + 0.7 * (p[1].y() - p[0].y());
    }
    const auto r = reconstruct_tangential_1form(m, {Placement::PrimalEdge, flux});
    for (std::size_t t = 0; t < m.num_triangles(); ++t)
      CHECK(std::abs(r.triangle_velocity[t].dot(m.triangle_normal(static_cast<Index>(t)))) < 1e-12);
  }
  SUBCASE("Poiseuille wall edges carry zero tangential velocity") {
    const auto m = structured_grid(16);
    const auto g = compute_dual_metrics(m);
    NavierStokesSolver solver(m, g, poiseuille::boundary(m));
    std::vector<double> psi(m.num_nodes());
    for (std::size_t v = 0; v < m.num_nodes(); ++v) psi[v] = poiseuille::psi(m.nodes()[v]);
    const auto s = solver.make_state(psi, 1.0, 1.0);
    for (Index e : m.boundary_edges()) {
      const auto [a, b] = m.edges()[e];
      const double y = m.nodes()[a].y();
      if (std::abs(y - m.nodes()[b].y()) < 1e-15 && (y == 0.0 || y == 1.0)) CHECK(std::abs(s.v_primal.values[e]) < 1e-12);
    }
  }
}

TEST_CASE("Poiseuille flow reaches the analytic steady state") {
  const auto m = delaunay_unit_square(512, 7);
  const auto g = compute_dual_metrics(m);
  const auto r = poiseuille::solve_steady(m, g);
  CHECK(r.converged);
  CHECK(r.steps < 20);
  double err = 0.0;
  for (std::size_t v = 0; v < m.num_nodes(); ++v)
    err = std::max(err, std::abs(r.state.psi.values[v] - poiseuille::psi(m.nodes()[v])));
  CHECK(err < 1e-3);
}

TEST_CASE("inviscid steps on a torus conserve circulation") {
  const auto m = curved_periodic_mesh(16);
  const auto g = compute_dual_metrics(m);
  NavierStokesSolver solver(m, g);
  std::vector<double> psi(m.num_nodes());
  for (std::size_t v = 0; v < m.num_nodes(); ++v) {
    const auto& p = m.nodes()[v];
    psi[v] = 0.01 * std::sin(2 * pi * p.x()) * std::cos(2 * pi * p.y());
  }
  auto s = solver.make_state(psi, 0.01, 0.0);
  const double scale = circulation_scale(m, s.u_dual);
  const double c0 = total_circulation(m, s.u_dual);
  for (int k = 0; k < 5; ++k) s = solver.step(s);
  CHECK(std::abs(total_circulation(m, s.u_dual) - c0) / scale < 1e-8);
  CHECK(s.time == doctest::Approx(0.05));
}
