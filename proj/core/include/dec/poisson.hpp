#pragma once

#include <vector>

#include "dec/dual_geometry.hpp"
#include "dec/forms.hpp"
#include "dec/linalg.hpp"
#include "dec/mesh.hpp"
#include "dec/sparse.hpp"

namespace dec {

// Discrete Laplacians. Every operator approximates the (non-negated) Laplacian
// of the continuous field, so manufactured right-hand sides are f = Laplacian(u).
//
// The dual-to-primal star on 1-forms is -*1^{-1} because ** = -1 on 1-forms
// in two dimensions; that sign is folded into the dual 0-form and 1-form
// operators below.

// (-d0^T) *1 d0: symmetric primal stiffness (integrated Laplacian over dual cells).
SparseMatrix primal0_stiffness(const SimplicialComplex2& mesh, const DualMetrics& metrics);

// *0^{-1} (-d0^T) *1 d0. Throws ZeroDualVolume.
SparseMatrix primal0_operator(const SimplicialComplex2& mesh, const DualMetrics& metrics);

// -*2 d1' *1^{-1} d1^T, where d1' drops the boundary-edge columns of d1.
// Throws ZeroDualVolume when an interior dual edge has zero length.
SparseMatrix dual0_operator(const SimplicialComplex2& mesh, const DualMetrics& metrics);

// d0 *0^{-1} (-d0^T) *1 - *1^{-1} d1^T *2 d1. A boundary edge with a zero dual
// edge gets no curl-curl term in its row; such rows are eliminated by the
// Dirichlet condition anyway. Throws ZeroDualVolume.
SparseMatrix one_form_operator(const SimplicialComplex2& mesh, const DualMetrics& metrics);

enum class Primal0Variant {
  Standard,         // *0^{-1}(-d0^T)*1 d0 u = f
  Star0Multiplied,  // (-d0^T)*1 d0 u = *0 f
};

// Neumann problem with g = 0; u is pinned to pin_value at pin_node.
FormField solve_poisson_primal0(const SimplicialComplex2& mesh, const DualMetrics& metrics, const FormField& f,
                                Index pin_node, double pin_value, Primal0Variant variant = Primal0Variant::Standard);

// Dual 0-form problem with g = 0; u pinned to pin_value at triangle pin_cell.
FormField solve_poisson_dual0(const SimplicialComplex2& mesh, const DualMetrics& metrics, const FormField& f,
                              Index pin_cell, double pin_value);

// 1-form problem. g holds the prescribed values on boundary edges (ordered as
// mesh.boundary_edges()), h the boundary data of tr *u (same ordering; may be
// empty for zero). Boundary unknowns are eliminated column by column.
FormField solve_poisson_1form(const SimplicialComplex2& mesh, const DualMetrics& metrics, const FormField& f,
                              const std::vector<double>& g, const std::vector<double>& h = {});

// The reduced (interior-edge) matrix solved by solve_poisson_1form.
SparseMatrix one_form_reduced_operator(const SimplicialComplex2& mesh, const DualMetrics& metrics);

// Interior node closest to (0.5, 0.5), ties to the smaller index.
Index central_interior_node(const SimplicialComplex2& mesh);
// Triangle whose circumcenter is closest to (0.5, 0.5).
Index central_triangle(const DualMetrics& metrics);

// Manufactured solutions on the unit square.
namespace manufactured {

// u = cos(pi x) cos(pi y), Laplacian -2 pi^2 cos(pi x) cos(pi y); zero Neumann data.
double cos_cos(const Point3& p);
double cos_cos_laplacian(const Point3& p);

// U = (x(1-x) y^2 (1-y)^2, y(1-y) x^2 (1-x)^2, 0); both boundary traces vanish.
Point3 poly_1form(const Point3& p);
Point3 poly_1form_laplacian(const Point3& p);

}  // namespace manufactured

}  // namespace dec
