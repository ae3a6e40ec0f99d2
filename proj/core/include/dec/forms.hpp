#pragma once

#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "dec/dual_geometry.hpp"
#include "dec/mesh.hpp"

namespace dec {

enum class Placement { PrimalNode, PrimalEdge, Triangle, DualNode, DualEdge, DualCell };

std::string_view to_string(Placement p);
int form_degree(Placement p);
std::size_t entity_count(const SimplicialComplex2& mesh, Placement p);

// Degrees of freedom of a k-form together with where they live.
struct FormField {
  Placement placement = Placement::PrimalNode;
  std::vector<double> values;
};

// Throws PlacementMismatch (wrong placement) or DimensionMismatch (wrong size).
void check_form(const SimplicialComplex2& mesh, const FormField& form, Placement expected);

using ScalarField = std::function<double(const Point3&)>;
using VectorField = std::function<Point3(const Point3&)>;

// Pointwise evaluation at nodes (PrimalNode) or circumcenters (DualNode).
FormField project_0form(const ScalarField& field, const SimplicialComplex2& mesh, const DualMetrics& metrics,
                        Placement placement);

// Line integral of field . tangent along every edge, a -> b, by 5-point
// Gauss-Legendre quadrature.
FormField project_1form(const VectorField& field, const SimplicialComplex2& mesh);

// Flux of the field across every signed dual edge. Inside triangle t the
// field is taken tangent to the triangle's plane and integrated along the
// piece from the edge midpoint to c_t; the dual edge direction is the edge
// tangent rotated 90 degrees counterclockwise about the triangle normal.
FormField project_dual_flux(const VectorField& field, const SimplicialComplex2& mesh, const DualMetrics& metrics);

// Weighted L2 norm of (numerical - exact):
//   PrimalNode: sum_v |*v| d_v^2        (signed dual cell areas)
//   DualNode:   sum_t |t| d_t^2
//   PrimalEdge: sum_e A_s (d_e / |e|)^2  (signed support areas)
// Negative accumulated sums are clamped to zero before the square root.
double l2_error(const FormField& numerical, const FormField& exact, const SimplicialComplex2& mesh,
                const DualMetrics& metrics);

// Continuous L2 distance between a dual 0-form read as constant on each
// triangle and the exact field, with the edge-midpoint rule per triangle.
double l2_error_piecewise_constant(const FormField& numerical, const ScalarField& exact,
                                   const SimplicialComplex2& mesh, const DualMetrics& metrics);

// CSV "index,value".
void write_form_csv(const FormField& form, std::ostream& out);

}  // namespace dec
