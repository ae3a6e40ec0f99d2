#include "dec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "dec/errors.hpp"

namespace dec {

namespace {

struct SlotRecord {
  Index a, b;  // canonical endpoints
  Index triangle;
  int local;
};

}  // namespace

SimplicialComplex2 SimplicialComplex2::build(std::vector<Point3> nodes, std::vector<Triangle> triangles,
                                             std::vector<std::array<Point3, 3>> corners) {
  SimplicialComplex2 m;
  m.nodes_ = std::move(nodes);
  m.triangles_ = std::move(triangles);
  m.corners_ = std::move(corners);

  const auto nv = static_cast<Index>(m.nodes_.size());
  const auto nt = static_cast<Index>(m.triangles_.size());
  if (!m.corners_.empty() && m.corners_.size() != m.triangles_.size()) {
    throw InvalidMesh("corner list size does not match triangle count");
  }

  for (Index t = 0; t < nt; ++t) {
    const auto& tri = m.triangles_[t];
    for (Index v : tri) {
      if (v < 0 || v >= nv) {
        throw InvalidMesh("triangle " + std::to_string(t) + " references node " + std::to_string(v) +
                          " out of range");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw DegenerateTriangle("triangle " + std::to_string(t) + " repeats a node");
    }
    const auto p = m.triangle_points(t);
    if (2.0 * dec::triangle_area(p[0], p[1], p[2]) < kDegenerateDoubledArea) {
      throw DegenerateTriangle("triangle " + std::to_string(t) + " has near-zero area");
    }
  }

  // Enumerate slots sorted by canonical endpoints; equal keys are one edge.
  std::vector<SlotRecord> slots;
  slots.reserve(3 * m.triangles_.size());
  for (Index t = 0; t < nt; ++t) {
    const auto& tri = m.triangles_[t];
    for (int i = 0; i < 3; ++i) {
      Index u = tri[i], w = tri[(i + 1) % 3];
      slots.push_back({std::min(u, w), std::max(u, w), t, i});
    }
  }
  std::sort(slots.begin(), slots.end(), [](const SlotRecord& x, const SlotRecord& y) {
    return std::tie(x.a, x.b, x.triangle, x.local) < std::tie(y.a, y.b, y.triangle, y.local);
  });

  m.tri_edges_.assign(nt, {-1, -1, -1});
  m.tri_signs_.assign(nt, {0, 0, 0});
  m.edge_tri_offsets_.push_back(0);
  for (std::size_t i = 0; i < slots.size();) {
    std::size_t j = i;
    while (j < slots.size() && slots[j].a == slots[i].a && slots[j].b == slots[i].b) ++j;
    const auto e = static_cast<Index>(m.edges_.size());
    if (j - i > 2) {
      throw NonManifoldEdge("edge [" + std::to_string(slots[i].a) + "," + std::to_string(slots[i].b) +
                            "] has " + std::to_string(j - i) + " incident triangles");
    }
    m.edges_.push_back({slots[i].a, slots[i].b});
    for (std::size_t k = i; k < j; ++k) {
      const auto& s = slots[k];
      const auto& tri = m.triangles_[s.triangle];
      m.tri_edges_[s.triangle][s.local] = e;
      m.tri_signs_[s.triangle][s.local] = tri[s.local] < tri[(s.local + 1) % 3] ? 1 : -1;
      m.edge_tris_.push_back({s.triangle, s.local});
    }
    if (j - i == 2) {
      const auto& s0 = slots[i];
      const auto& s1 = slots[i + 1];
      if (m.tri_signs_[s0.triangle][s0.local] == m.tri_signs_[s1.triangle][s1.local]) {
        throw InconsistentOrientation("triangles " + std::to_string(s0.triangle) + " and " +
                                      std::to_string(s1.triangle) + " induce the same orientation on edge [" +
                                      std::to_string(s0.a) + "," + std::to_string(s0.b) + "]");
      }
    }
    m.edge_tri_offsets_.push_back(static_cast<Index>(m.edge_tris_.size()));
    i = j;
  }

  // Node -> triangles.
  m.node_tri_offsets_.assign(nv + 1, 0);
  for (const auto& tri : m.triangles_)
    for (Index v : tri) ++m.node_tri_offsets_[v + 1];
  for (Index v = 0; v < nv; ++v) m.node_tri_offsets_[v + 1] += m.node_tri_offsets_[v];
  m.node_tris_.resize(m.node_tri_offsets_.back());
  {
    std::vector<Index> fill(m.node_tri_offsets_.begin(), m.node_tri_offsets_.end() - 1);
    for (Index t = 0; t < nt; ++t)
      for (Index v : m.triangles_[t]) m.node_tris_[fill[v]++] = t;
  }

  m.node_on_boundary_.assign(nv, 0);
  for (Index e = 0; e < static_cast<Index>(m.edges_.size()); ++e) {
    if (m.is_boundary_edge(e)) {
      m.boundary_edges_.push_back(e);
      m.node_on_boundary_[m.edges_[e][0]] = 1;
      m.node_on_boundary_[m.edges_[e][1]] = 1;
    }
  }
  for (Index v = 0; v < nv; ++v)
    if (m.node_on_boundary_[v]) m.boundary_nodes_.push_back(v);
  return m;
}

SimplicialComplex2 build_complex(std::vector<Point3> nodes, std::vector<Triangle> triangles) {
  return SimplicialComplex2::build(std::move(nodes), std::move(triangles));
}

std::span<const EdgeIncidence> SimplicialComplex2::edge_triangles(Index e) const {
  return {edge_tris_.data() + edge_tri_offsets_[e],
          static_cast<std::size_t>(edge_tri_offsets_[e + 1] - edge_tri_offsets_[e])};
}

std::span<const Index> SimplicialComplex2::node_triangles(Index v) const {
  return {node_tris_.data() + node_tri_offsets_[v],
          static_cast<std::size_t>(node_tri_offsets_[v + 1] - node_tri_offsets_[v])};
}

std::array<Point3, 3> SimplicialComplex2::triangle_points(Index t) const {
  if (!corners_.empty()) return corners_[t];
  const auto& tri = triangles_[t];
  return {nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]};
}

std::array<Point3, 2> SimplicialComplex2::edge_points(Index e) const {
  const auto& inc = edge_triangles(e).front();
  const auto p = triangle_points(inc.triangle);
  const Point3& from = p[inc.local];
  const Point3& to = p[(inc.local + 1) % 3];
  if (tri_signs_[inc.triangle][inc.local] > 0) return {from, to};
  return {to, from};
}

Point3 SimplicialComplex2::triangle_normal(Index t) const {
  const auto p = triangle_points(t);
  return (p[1] - p[0]).cross(p[2] - p[0]).normalized();
}

double SimplicialComplex2::triangle_area(Index t) const {
  const auto p = triangle_points(t);
  return dec::triangle_area(p[0], p[1], p[2]);
}

double SimplicialComplex2::edge_length(Index e) const {
  const auto p = edge_points(e);
  return (p[1] - p[0]).norm();
}

double SimplicialComplex2::total_area() const {
  double sum = 0.0;
  for (Index t = 0; t < static_cast<Index>(num_triangles()); ++t) sum += triangle_area(t);
  return sum;
}

void SimplicialComplex2::set_node_positions(std::vector<Point3> nodes) {
  if (is_periodic()) throw InvalidMesh("cannot move nodes of a periodic complex");
  if (nodes.size() != nodes_.size()) throw DimensionMismatch("node count changed");
  nodes_ = std::move(nodes);
}

int SimplicialComplex2::local_slot(Index t, Index e) const {
  const auto& te = tri_edges_[t];
  for (int i = 0; i < 3; ++i)
    if (te[i] == e) return i;
  return -1;
}

// ---- elementary geometry ------------------------------------------------------

double triangle_area(const Point3& p0, const Point3& p1, const Point3& p2) {
  return 0.5 * (p1 - p0).cross(p2 - p0).norm();
}

double normalized_incircle(const Point3& p, const Point3& q, const Point3& a, const Point3& b) {
  // Frame in the plane of (p, q, a): x along pq, y towards a.
  const Point3 ex = (q - p).normalized();
  Point3 ya = (a - p) - (a - p).dot(ex) * ex;
  const Point3 ey = ya.normalized();
  const Eigen::Vector2d P(0.0, 0.0);
  const Eigen::Vector2d Q((q - p).norm(), 0.0);
  const Eigen::Vector2d A((a - p).dot(ex), (a - p).dot(ey));
  const Point3 rb = b - p;
  const double bx = rb.dot(ex);
  const double by = -(rb - bx * ex).norm();  // unfolded to the far side
  const Eigen::Vector2d B(bx, by);

  auto row = [&](const Eigen::Vector2d& v) {
    const Eigen::Vector2d d = v - B;
    return Eigen::Vector3d(d.x(), d.y(), d.squaredNorm());
  };
  Eigen::Matrix3d m;
  m.row(0) = row(P);
  m.row(1) = row(Q);
  m.row(2) = row(A);
  const double det = m.determinant();
  const double scale = (P - A).norm() * (Q - A).norm() * (P - B).norm() * (Q - B).norm();
  return det / scale;
}

double aspect_ratio(const Point3& p0, const Point3& p1, const Point3& p2) {
  const double a = (p1 - p0).norm();
  const double b = (p2 - p1).norm();
  const double c = (p0 - p2).norm();
  const double area = triangle_area(p0, p1, p2);
  const double s = 0.5 * (a + b + c);
  // R = abc / (4A), r = A / s
  return a * b * c * s / (4.0 * area * area);
}

// ---- quality -----------------------------------------------------------------------

bool is_non_delaunay_edge(const SimplicialComplex2& mesh, Index e) {
  const auto inc = mesh.edge_triangles(e);
  if (inc.size() != 2) return false;
  const auto p0 = mesh.triangle_points(inc[0].triangle);
  const auto p1 = mesh.triangle_points(inc[1].triangle);
  const int s0 = inc[0].local;
  const int s1 = inc[1].local;
  // Shared edge as seen from triangle 0 (counterclockwise in it), apex of each.
  const Point3& p = p0[s0];
  const Point3& q = p0[(s0 + 1) % 3];
  const Point3& a = p0[(s0 + 2) % 3];
  // Apex of triangle 1 expressed relative to its own copy of the edge; on a
  // periodic complex the copies may differ by a translation.
  const Point3 offset = p - p1[(s1 + 1) % 3];
  const Point3 b = p1[(s1 + 2) % 3] + offset;
  return normalized_incircle(p, q, a, b) > kIncircleTolerance;
}

std::vector<std::uint8_t> non_delaunay_edge_flags(const SimplicialComplex2& mesh) {
  std::vector<std::uint8_t> flags(mesh.num_edges(), 0);
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e) flags[e] = is_non_delaunay_edge(mesh, e) ? 1 : 0;
  return flags;
}

MeshQuality quality_metrics(const SimplicialComplex2& mesh) {
  MeshQuality q;
  const auto flags = non_delaunay_edge_flags(mesh);
  std::vector<std::uint8_t> tri_flag(mesh.num_triangles(), 0);
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e) {
    if (!flags[e]) continue;
    ++q.non_delaunay_edges;
    for (const auto& inc : mesh.edge_triangles(e)) tri_flag[inc.triangle] = 1;
  }
  for (auto f : tri_flag) q.non_delaunay_triangles += f;
  if (mesh.num_edges() > 0)
    q.non_delaunay_edge_ratio = static_cast<double>(q.non_delaunay_edges) / static_cast<double>(mesh.num_edges());
  if (mesh.num_triangles() > 0)
    q.non_delaunay_triangle_ratio =
        static_cast<double>(q.non_delaunay_triangles) / static_cast<double>(mesh.num_triangles());

  q.min_edge_length = std::numeric_limits<double>::infinity();
  q.min_triangle_area = std::numeric_limits<double>::infinity();
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e) {
    const double len = mesh.edge_length(e);
    q.min_edge_length = std::min(q.min_edge_length, len);
    q.max_edge_length = std::max(q.max_edge_length, len);
  }
  for (Index t = 0; t < static_cast<Index>(mesh.num_triangles()); ++t) {
    const auto p = mesh.triangle_points(t);
    q.min_triangle_area = std::min(q.min_triangle_area, triangle_area(p[0], p[1], p[2]));
    q.max_aspect_ratio = std::max(q.max_aspect_ratio, aspect_ratio(p[0], p[1], p[2]));
  }
  return q;
}

}  // namespace dec
