#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "dec/dual_geometry.hpp"
#include "dec/errors.hpp"
#include "dec/experiment.hpp"
#include "dec/mesh_gen.hpp"
#include "support/dense_oracle.hpp"

using namespace dec;

namespace {

Index edge_index(const SimplicialComplex2& m, Index a, Index b) {
  for (std::size_t e = 0; e < m.num_edges(); ++e)
    if (m.edges()[e] == Edge{std::min(a, b), std::max(a, b)}) return static_cast<Index>(e);
  return -1;
}

SimplicialComplex2 pair_mesh(double apex) {
  return build_complex({{0, 0, 0}, {1, 0, 0}, {0.5, apex, 0}, {0.5, -apex, 0}}, {{0, 1, 2}, {1, 0, 3}});
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("circumcenters") {
  const Point3 a = circumcenter({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  CHECK(a.x() == doctest::Approx(0.5));
  CHECK(a.y() == doctest::Approx(0.5));
  const Point3 b = circumcenter({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0});
  CHECK(b.x() == doctest::Approx(0.5));
  CHECK(b.y() == doctest::Approx(std::sqrt(3.0) / 6));
  const Point3 c = circumcenter({0, 0, 0}, {1, 0, 0}, {0.5, 0.1, 0});
  CHECK(c.x() == doctest::Approx(0.5));
  CHECK(c.y() == doctest::Approx(-1.2));
}

TEST_CASE("signed dual edges, support areas and stars of a triangle pair") {
  SUBCASE("Delaunay pair") {
    const auto m = pair_mesh(1.0);
    const auto g = compute_dual_metrics(m);
    const Index e = edge_index(m, 0, 1);
    CHECK(signed_dual_edge_length(m, g, e) == doctest::Approx(0.75));
    CHECK(support_area(m, g, e) == doctest::Approx(0.375));
    CHECK(g.stars.star1[e] == doctest::Approx(0.75));
  }
  SUBCASE("flipped pair") {
    const auto m = pair_mesh(0.1);
    const auto g = compute_dual_metrics(m);
    const Index e = edge_index(m, 0, 1);
    CHECK(signed_dual_edge_length(m, g, e) == doctest::Approx(-2.4));
    CHECK(support_area(m, g, e) == doctest::Approx(-1.2));
    CHECK(g.stars.star1[e] == doctest::Approx(-2.4));
    // Tiling still holds with the negative pieces.
    CHECK(sum(g.dual_cell_area) == doctest::Approx(m.total_area()).epsilon(1e-13));
    CHECK(sum(g.support_area) == doctest::Approx(m.total_area()).epsilon(1e-13));
  }
}

TEST_CASE("right-isosceles square") {
  const auto m = build_complex({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
  const auto g = compute_dual_metrics(m);
  const Index leg = edge_index(m, 0, 1);
  CHECK(g.dual_edge_length[leg] == doctest::Approx(0.5));
  CHECK(g.stars.star1[leg] == doctest::Approx(0.5));
  // Both circumcenters sit on the diagonal: zero dual edge, strict stars refuse.
  CHECK(std::abs(g.dual_edge_length[edge_index(m, 0, 2)]) < 1e-15);
  CHECK_THROWS_AS(hodge_stars(m, g), ZeroDualVolume);
  CHECK(std::isinf(g.stars.star1_inv[edge_index(m, 0, 2)]));
  CHECK_THROWS_AS(require_invertible(g, StarKind::Star1), ZeroDualVolume);

  const auto unit = build_complex({{0, 0, 0}, {std::sqrt(2.0), 0, 0}, {0, std::sqrt(2.0), 0}}, {{0, 1, 2}});
  CHECK(compute_dual_metrics(unit).stars.star2[0] == doctest::Approx(1.0));
}

TEST_CASE("structured grid dual cells are h^2 and supports tile the square") {
  const int n = 6;
  const auto m = structured_grid(n);
  const auto g = compute_dual_metrics(m);
  const double h = 1.0 / n;
  for (std::size_t v = 0; v < m.num_nodes(); ++v)
    if (!m.is_boundary_node(static_cast<Index>(v))) CHECK(g.dual_cell_area[v] == doctest::Approx(h * h));
  CHECK(sum(g.support_area) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("signed tiling on distorted, subdivided and curved meshes") {
  std::vector<SimplicialComplex2> meshes;
  for (auto group : {MeshGroup::Delaunay, MeshGroup::Nd15, MeshGroup::Subdivided})
    meshes.push_back(build_group_level(group, 1, 128, 7));
  meshes.push_back(curved_periodic_mesh(16));
  for (const auto& m : meshes) {
    const auto g = compute_dual_metrics(m);
    const double area = sum(g.triangle_area);
    CHECK(std::abs(sum(g.dual_cell_area) - area) / area < 1e-12);
    CHECK(std::abs(sum(g.support_area) - area) / area < 1e-12);
  }
}

TEST_CASE("dual metrics agree with the brute-force oracle") {
  for (const auto& m : {pair_mesh(0.1), pair_mesh(1.0), build_group_level(MeshGroup::Nd15, 0, 128, 3)}) {
    const auto g = compute_dual_metrics(m);
    const oracle::Dense d(m);
    for (int e = 0; e < d.ne; ++e) {
      CHECK(g.dual_edge_length[e] == doctest::Approx(d.dual_len(e)).epsilon(1e-12));
      CHECK(g.support_area[e] == doctest::Approx(d.support(e)).epsilon(1e-12));
    }
    for (int v = 0; v < d.nv; ++v) CHECK(g.dual_cell_area[v] == doctest::Approx(d.dual_area(v)).epsilon(1e-12));
  }
}

TEST_CASE("boundary closure") {
  const auto torus = periodic_identify(structured_grid(4));
  CHECK(boundary_closure_matrix(torus).cols() == 0);

  const auto m = build_complex({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
  const auto db = boundary_closure_matrix(m);
  REQUIRE(db.cols() == 4);
  // Unit tangential speed along the counterclockwise boundary: each boundary
  // edge carries its length with the orientation its triangle induces.
  std::vector<double> w;
  for (Index e : m.boundary_edges()) {
    const auto inc = m.edge_triangles(e)[0];
    w.push_back(m.edge_length(e) * m.triangle_edge_signs(inc.triangle)[inc.local]);
  }
  CHECK(sum(spmv(db, w)) == doctest::Approx(4.0));
  const std::vector<double> zero(4, 0.0);
  for (double x : spmv(db, zero)) CHECK(x == 0.0);
}

TEST_CASE("dual volume CSV lists every signed volume") {
  const auto m = pair_mesh(0.1);
  const auto g = compute_dual_metrics(m);
  std::stringstream ss;
  write_dual_volumes_csv(m, g, ss);
  std::string line;
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows >= static_cast<int>(m.num_nodes() + m.num_edges()));
}
