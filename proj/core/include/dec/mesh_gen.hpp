#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dec/mesh.hpp"

namespace dec {

// Delaunay triangulation of a planar point set (Bowyer-Watson with a
// super-triangle, followed by a Lawson flip pass that removes any pair left
// non-Delaunay by round-off). Triangles are counterclockwise.
std::vector<Triangle> delaunay_triangulate(std::span<const Eigen::Vector2d> points);

// Delaunay mesh of the unit square from a boundary-conforming jittered grid:
// corners, boundary points at spacing h, interior grid points moved by up to
// 0.3h in each coordinate. The grid is sized so the triangle count is the
// closest 2 n^2 to the target. Throws GenerationFailed after retries.
SimplicialComplex2 delaunay_unit_square(int target_triangle_count, std::uint64_t seed);

// Right-isosceles n x n grid over the unit square, each cell split along its
// (0,0)-(1,1) diagonal.
SimplicialComplex2 structured_grid(int cells_per_side);

struct DistortionSpec {
  double target_edge_ratio = 0.0;
  std::uint64_t rng_seed = 0;
  double squeeze_factor = 0.5;
  int max_steps_per_edge = 8;
  int max_passes = 50;
  // Moves leaving any incident triangle above this aspect ratio are rejected.
  double max_aspect_ratio = 500.0;
  // ... or with an edge longer than this multiple of the input's longest edge.
  double max_edge_growth = 1.25;
};

// Moves apexes of randomly chosen interior edges towards the edge midpoint
// until the fraction of edges shared by non-Delaunay pairs lies in
// [target, target + 0.01]. Boundary nodes never move. Moves that would invert
// a triangle, exceed the aspect-ratio or edge-length caps, or overshoot the
// window are rolled back.
// Throws TargetUnreachable.
SimplicialComplex2 distort_to_non_delaunay(const SimplicialComplex2& mesh, const DistortionSpec& spec);

// Splits every triangle into four by edge midpoints. New node of edge e has
// index num_nodes() + e.
SimplicialComplex2 midpoint_subdivide(const SimplicialComplex2& mesh);

// z = 0.1 sin(4 pi x) cos(4 pi y)
double sinusoidal_height(double x, double y);
SimplicialComplex2 lift_sinusoidal(const SimplicialComplex2& mesh);

// Identifies nodes on x = 1 with x = 0 and y = 1 with y = 0 (tolerance 1e-9 in
// the plane). The result is a torus; triangles keep their original corner
// coordinates for geometry. Throws MismatchedBoundary.
SimplicialComplex2 periodic_identify(const SimplicialComplex2& mesh);

}  // namespace dec
