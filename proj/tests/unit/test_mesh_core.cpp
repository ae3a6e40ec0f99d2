#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dec/errors.hpp"
#include "dec/exterior_derivative.hpp"
#include "dec/mesh.hpp"
#include "dec/mesh_gen.hpp"
#include "dec/mesh_io.hpp"

using namespace dec;

namespace {

SimplicialComplex2 unit_square() {
  return build_complex({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
}

Index edge_index(const SimplicialComplex2& m, Index a, Index b) {
  for (std::size_t e = 0; e < m.num_edges(); ++e)
    if (m.edges()[e] == Edge{std::min(a, b), std::max(a, b)}) return static_cast<Index>(e);
  return -1;
}

}  // namespace

TEST_CASE("two-triangle square has five edges, one interior") {
  const auto m = unit_square();
  CHECK(m.num_edges() == 5);
  CHECK(m.boundary_edges().size() == 4);
  const Index diag = edge_index(m, 0, 2);
  REQUIRE(diag >= 0);
  CHECK_FALSE(m.is_boundary_edge(diag));
  CHECK(m.edge_triangles(diag).size() == 2);
  CHECK(m.euler_characteristic() == 1);
}

TEST_CASE("single triangle: three boundary edges") {
  const auto m = build_complex({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  CHECK(m.num_edges() == 3);
  CHECK(m.boundary_edges().size() == 3);
  CHECK(m.boundary_nodes().size() == 3);
}

TEST_CASE("invalid complexes are rejected") {
  SUBCASE("three triangles on one edge") {
    CHECK_THROWS_AS(build_complex({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, -1, 0}},
                                  {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}),
                    NonManifoldEdge);
  }
  SUBCASE("inconsistent orientation") {
    CHECK_THROWS_AS(build_complex({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 3, 2}}),
                    InconsistentOrientation);
  }
  SUBCASE("degenerate") {
    CHECK_THROWS_AS(build_complex({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}), DegenerateTriangle);
  }
  SUBCASE("index out of range") {
    CHECK_THROWS_AS(build_complex({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 7}}), InvalidMesh);
  }
}

TEST_CASE("d0 rows and d1 orientation") {
  const auto m = build_complex({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  const auto d = exterior_derivative_matrices(m);
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const auto [a, b] = m.edges()[e];
    CHECK(d.d0.coeff(e, a) == -1.0);
    CHECK(d.d0.coeff(e, b) == 1.0);
    CHECK(d.d0.row_cols(e).size() == 2);
  }
  // Triangle [0,1,2] traverses 0->1, 1->2 and 2->0.
  CHECK(d.d1.coeff(0, edge_index(m, 0, 1)) == 1.0);
  CHECK(d.d1.coeff(0, edge_index(m, 1, 2)) == 1.0);
  CHECK(d.d1.coeff(0, edge_index(m, 0, 2)) == -1.0);
}

TEST_CASE("d1 d0 vanishes exactly") {
  for (const auto& m : {unit_square(), delaunay_unit_square(500, 3), structured_grid(5),
                        periodic_identify(structured_grid(4))}) {
    const auto d = exterior_derivative_matrices(m);
    const auto dd = d.d1 * d.d0;
    CHECK(dd.nnz() == 0);
    CHECK(dd.max_abs() == 0.0);
  }
}

TEST_CASE("quality metrics") {
  SUBCASE("equilateral aspect ratio is 2") {
    CHECK(aspect_ratio({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("structured grid has no non-Delaunay edges") {
    const auto q = quality_metrics(structured_grid(8));
    CHECK(q.non_delaunay_edges == 0);
    CHECK(q.non_delaunay_edge_ratio == 0.0);
    CHECK(q.max_edge_length == doctest::Approx(std::sqrt(2.0) / 8));
    CHECK(q.min_edge_length == doctest::Approx(1.0 / 8));
  }
  SUBCASE("squeezed pair is flagged and both triangles count") {
    const auto m = build_complex({{0, 0, 0}, {1, 0, 0}, {0.5, 0.1, 0}, {0.5, -0.1, 0}}, {{0, 1, 2}, {1, 0, 3}});
    const auto q = quality_metrics(m);
    CHECK(q.non_delaunay_edges == 1);
    CHECK(q.non_delaunay_triangles == 2);
    CHECK(q.non_delaunay_triangle_ratio == 1.0);
    CHECK(q.non_delaunay_edge_ratio == doctest::Approx(1.0 / 5));
  }
  SUBCASE("normalized incircle equals -sin(alpha + beta)") {
    // Apexes at (0.5, +-0.5): alpha = beta = 90 degrees.
    CHECK(normalized_incircle({0, 0, 0}, {1, 0, 0}, {0.5, 0.5, 0}, {0.5, -0.5, 0}) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normalized_incircle({0, 0, 0}, {1, 0, 0}, {0.5, 0.1, 0}, {0.5, -0.1, 0}) > 0.0);
    CHECK(normalized_incircle({0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}, {0.5, -1, 0}) < 0.0);
  }
}

TEST_CASE("OFF round trip and errors") {
  const auto m = delaunay_unit_square(50, 11);
  std::stringstream ss;
  write_off(m, ss);
  const auto r = read_off(ss);
  CHECK(r.nodes() == m.nodes());
  CHECK(r.triangles() == m.triangles());
  CHECK(r.edges() == m.edges());

  std::stringstream counts("OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n");
  const auto sq = read_off(counts);
  CHECK(sq.num_nodes() == 4);
  CHECK(sq.num_triangles() == 2);

  std::stringstream quad("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
  CHECK_THROWS_AS(read_off(quad), ParseError);
  std::stringstream bad("PLY\n");
  CHECK_THROWS_AS(read_off(bad), ParseError);
}
