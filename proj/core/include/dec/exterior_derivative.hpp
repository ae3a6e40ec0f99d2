#pragma once

#include "dec/mesh.hpp"
#include "dec/sparse.hpp"

namespace dec {

// Signed incidence matrices of the complex.
//   d0: #edges x #nodes, row [a,b] holds -1 at a and +1 at b.
//   d1: #triangles x #edges, +-1 by the orientation each triangle induces.
struct ExteriorDerivatives {
  SparseMatrix d0;
  SparseMatrix d1;
};

ExteriorDerivatives exterior_derivative_matrices(const SimplicialComplex2& mesh);

}  // namespace dec
