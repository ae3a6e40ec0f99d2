#include "dec/exterior_derivative.hpp"

namespace dec {

ExteriorDerivatives exterior_derivative_matrices(const SimplicialComplex2& mesh) {
  const auto nv = static_cast<Index>(mesh.num_nodes());
  const auto ne = static_cast<Index>(mesh.num_edges());
  const auto nt = static_cast<Index>(mesh.num_triangles());

  std::vector<Triplet> t0;
  t0.reserve(2 * static_cast<std::size_t>(ne));
  for (Index e = 0; e < ne; ++e) {
    const auto& ab = mesh.edges()[e];
    t0.push_back({e, ab[0], -1.0});
    t0.push_back({e, ab[1], 1.0});
  }
  std::vector<Triplet> t1;
  t1.reserve(3 * static_cast<std::size_t>(nt));
  for (Index t = 0; t < nt; ++t) {
    const auto& te = mesh.triangle_edges(t);
    const auto& ts = mesh.triangle_edge_signs(t);
    for (int i = 0; i < 3; ++i) t1.push_back({t, te[i], static_cast<double>(ts[i])});
  }
  return {SparseMatrix::from_triplets(ne, nv, std::move(t0)), SparseMatrix::from_triplets(nt, ne, std::move(t1))};
}

}  // namespace dec
