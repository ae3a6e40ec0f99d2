#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dec {

using Index = int;
using Point3 = Eigen::Vector3d;
using Triangle = std::array<Index, 3>;
using Edge = std::array<Index, 2>;  // canonical: [0] < [1]

// Doubled triangle area below which a triangle is rejected as degenerate.
inline constexpr double kDegenerateDoubledArea = 1e-14;

// Co-circular tolerance on the normalized in-circle determinant.
inline constexpr double kIncircleTolerance = 1e-12;

// One (triangle, local edge slot) incidence of an edge.
struct EdgeIncidence {
  Index triangle;
  int local;  // edge slot in the triangle: vertices (local, local+1 mod 3)
};

// Oriented simplicial 2-complex embedded in 3-space.
//
// Local edge slot i of a triangle [v0,v1,v2] joins v_i and v_{i+1 mod 3}; the
// vertex opposite slot i is v_{i+2 mod 3}. Edges are stored canonically with
// the smaller node index first, and the d0 sign convention follows from that.
//
// Periodic complexes (see periodic_identify) carry per-triangle corner
// coordinates: several corners may refer to the same logical node at
// different translated positions. All geometry goes through triangle_points(),
// which returns the corners when present and the node positions otherwise.
class SimplicialComplex2 {
 public:
  SimplicialComplex2() = default;

  // Builds the complex and validates it. Throws InvalidMesh (index out of
  // range), DegenerateTriangle, NonManifoldEdge or InconsistentOrientation.
  static SimplicialComplex2 build(std::vector<Point3> nodes, std::vector<Triangle> triangles,
                                  std::vector<std::array<Point3, 3>> corners = {});

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  const std::vector<Point3>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::array<Point3, 3>>& corners() const { return corners_; }
  bool is_periodic() const { return !corners_.empty(); }

  // Canonical edge index of each local slot.
  const std::array<Index, 3>& triangle_edges(Index t) const { return tri_edges_[t]; }
  // +1 if the triangle traverses the edge from its smaller to larger node.
  const std::array<std::int8_t, 3>& triangle_edge_signs(Index t) const { return tri_signs_[t]; }
  std::span<const EdgeIncidence> edge_triangles(Index e) const;
  std::span<const Index> node_triangles(Index v) const;

  const std::vector<Index>& boundary_edges() const { return boundary_edges_; }
  const std::vector<Index>& boundary_nodes() const { return boundary_nodes_; }
  bool is_boundary_edge(Index e) const { return edge_tri_offsets_[e + 1] - edge_tri_offsets_[e] == 1; }
  bool is_boundary_node(Index v) const { return node_on_boundary_[v] != 0; }

  std::array<Point3, 3> triangle_points(Index t) const;
  // Positions of edge endpoints (a, b) in the frame of the edge's first triangle.
  std::array<Point3, 2> edge_points(Index e) const;
  Point3 triangle_normal(Index t) const;  // unit
  double triangle_area(Index t) const;
  double edge_length(Index e) const;
  double total_area() const;

  std::int64_t euler_characteristic() const {
    return static_cast<std::int64_t>(num_nodes()) - static_cast<std::int64_t>(num_edges()) +
           static_cast<std::int64_t>(num_triangles());
  }

  // Replaces node coordinates (connectivity unchanged). Only valid for
  // non-periodic complexes; validity of the geometry is the caller's concern.
  void set_node_positions(std::vector<Point3> nodes);

  // Local slot of edge e inside triangle t, or -1.
  int local_slot(Index t, Index e) const;

 private:
  std::vector<Point3> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<std::array<Point3, 3>> corners_;
  std::vector<Edge> edges_;
  std::vector<std::array<Index, 3>> tri_edges_;
  std::vector<std::array<std::int8_t, 3>> tri_signs_;
  std::vector<Index> edge_tri_offsets_;
  std::vector<EdgeIncidence> edge_tris_;
  std::vector<Index> node_tri_offsets_;
  std::vector<Index> node_tris_;
  std::vector<Index> boundary_edges_;
  std::vector<Index> boundary_nodes_;
  std::vector<std::uint8_t> node_on_boundary_;
};

// Free-function spelling of SimplicialComplex2::build.
SimplicialComplex2 build_complex(std::vector<Point3> nodes, std::vector<Triangle> triangles);

// ---- elementary geometry ------------------------------------------------------

double triangle_area(const Point3& p0, const Point3& p1, const Point3& p2);

// Normalized in-circle determinant of the pair sharing edge (p, q), with apex
// `a` on one side and `b` on the other. The second triangle is unfolded about
// the shared edge into the plane of (p, q, a). The value equals -sin(alpha +
// beta) where alpha, beta are the angles opposite the shared edge; positive
// means `b` lies strictly inside the circumcircle of (p, q, a).
double normalized_incircle(const Point3& p, const Point3& q, const Point3& a, const Point3& b);

// Circumradius over inradius.
double aspect_ratio(const Point3& p0, const Point3& p1, const Point3& p2);

// ---- quality -----------------------------------------------------------------------

// True when the interior edge's triangle pair fails the empty-circumcircle
// test. Boundary edges are never non-Delaunay.
bool is_non_delaunay_edge(const SimplicialComplex2& mesh, Index e);

std::vector<std::uint8_t> non_delaunay_edge_flags(const SimplicialComplex2& mesh);

struct MeshQuality {
  double max_aspect_ratio = 0.0;
  std::size_t non_delaunay_edges = 0;
  std::size_t non_delaunay_triangles = 0;
  double non_delaunay_edge_ratio = 0.0;
  double non_delaunay_triangle_ratio = 0.0;
  double min_edge_length = 0.0;
  double max_edge_length = 0.0;
  double min_triangle_area = 0.0;
};

MeshQuality quality_metrics(const SimplicialComplex2& mesh);

}  // namespace dec
