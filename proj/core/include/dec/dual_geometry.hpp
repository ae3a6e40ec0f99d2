#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "dec/mesh.hpp"
#include "dec/sparse.hpp"

namespace dec {

// Volumes below this magnitude cannot be divided by.
inline constexpr double kZeroVolume = 1e-13;

// Diagonal Hodge star coefficients. Inverses are elementwise reciprocals and
// are +inf where the corresponding volume is (numerically) zero; operators
// that need an inverse check for that through require_invertible().
struct HodgeStars {
  std::vector<double> star0, star1, star2;
  std::vector<double> star0_inv, star1_inv, star2_inv;
};

// Signed circumcentric dual of a triangle mesh.
//
// For triangle t and one of its edges e, the dual edge piece inside t runs from
// the edge midpoint m_e to the circumcenter c_t. Its signed length is
// +|c_t - m_e| when c_t lies on the same side of e as the vertex of t opposite
// e, and negative otherwise (zero on the line). Dual edge lengths, dual cell
// areas (sums of elementary sectors (v, m_e, c_t) carrying the same sign) and
// support areas all follow from these signed pieces.
struct DualMetrics {
  std::vector<Point3> circumcenters;           // per triangle
  std::vector<std::array<double, 3>> pieces;   // per triangle and local edge slot
  std::vector<double> primal_edge_length;      // per edge
  std::vector<double> triangle_area;           // per triangle
  std::vector<double> dual_edge_length;        // per edge, signed
  std::vector<double> dual_cell_area;          // per node, signed
  std::vector<double> support_area;            // per edge, signed
  HodgeStars stars;
};

Point3 circumcenter(const Point3& p0, const Point3& p1, const Point3& p2);

// Sign of the circumcenter piece of (triangle t, local slot) by the
// side-of-line test: +1, -1 or 0.
int dual_piece_sign(const SimplicialComplex2& mesh, Index t, int local, const Point3& center);

// The same piece expressed as the coordinate of c_t along the inward normal of
// the edge, measured from the edge midpoint. Equals sign * |c_t - m_e|.
double dual_piece_frame(const SimplicialComplex2& mesh, Index t, int local, const Point3& center);

DualMetrics compute_dual_metrics(const SimplicialComplex2& mesh);

double signed_dual_edge_length(const SimplicialComplex2& mesh, const DualMetrics& metrics, Index edge);
double signed_dual_cell_area(const SimplicialComplex2& mesh, const DualMetrics& metrics, Index node);
double support_area(const SimplicialComplex2& mesh, const DualMetrics& metrics, Index edge);

// Strict star computation: throws ZeroDualVolume if any dual cell area or dual
// edge length has magnitude below kZeroVolume.
HodgeStars hodge_stars(const SimplicialComplex2& mesh, const DualMetrics& metrics);

// Same coefficients without the zero-volume check.
HodgeStars hodge_stars_unchecked(const SimplicialComplex2& mesh, const DualMetrics& metrics);

enum class StarKind { Star0, Star1, Star2 };

// Throws ZeroDualVolume naming the first entity whose inverse is unavailable.
void require_invertible(const DualMetrics& metrics, StarKind kind);

// (#nodes x #boundary-edges). Column j belongs to boundary edge
// mesh.boundary_edges()[j]; both endpoints receive half of the edge value times
// the orientation induced by the edge's triangle.
SparseMatrix boundary_closure_matrix(const SimplicialComplex2& mesh);

// Expands a boundary-edge vector to all edges (zeros elsewhere) and back.
std::vector<double> gather_boundary_edges(const SimplicialComplex2& mesh, const std::vector<double>& edge_values);

// CSV rows "kind,index,value" for every signed volume.
void write_dual_volumes_csv(const SimplicialComplex2& mesh, const DualMetrics& metrics, std::ostream& out);

}  // namespace dec
