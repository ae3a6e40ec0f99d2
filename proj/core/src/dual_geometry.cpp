#include "dec/dual_geometry.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "dec/errors.hpp"

namespace dec {

Point3 circumcenter(const Point3& p0, const Point3& p1, const Point3& p2) {
  const Point3 a = p1 - p0;
  const Point3 b = p2 - p0;
  const Point3 axb = a.cross(b);
  if (!(axb.norm() >= kDegenerateDoubledArea)) throw DegenerateTriangle("circumcenter of a degenerate triangle");
  const double denom = 2.0 * axb.squaredNorm();
  return p0 + (a.squaredNorm() * b - b.squaredNorm() * a).cross(axb) / denom;
}

int dual_piece_sign(const SimplicialComplex2& mesh, Index t, int local, const Point3& center) {
  const auto pts = mesh.triangle_points(t);
  const Point3& p = pts[local];
  const Point3& q = pts[(local + 1) % 3];
  const Point3& apex = pts[(local + 2) % 3];
  const Point3 edge = q - p;
  const Point3 normal = edge.cross(apex - p);  // points to the side of the apex
  const double side = edge.cross(center - p).dot(normal);
  const double tol = 1e-12 * edge.squaredNorm() * normal.norm();
  if (std::abs(side) <= tol) return 0;
  return side > 0.0 ? 1 : -1;
}

double dual_piece_frame(const SimplicialComplex2& mesh, Index t, int local, const Point3& center) {
  const auto pts = mesh.triangle_points(t);
  const Point3& p = pts[local];
  const Point3& q = pts[(local + 1) % 3];
  const Point3 inward = mesh.triangle_normal(t).cross(q - p).normalized();
  return (center - 0.5 * (p + q)).dot(inward);
}

DualMetrics compute_dual_metrics(const SimplicialComplex2& mesh) {
  const auto nv = static_cast<Index>(mesh.num_nodes());
  const auto ne = static_cast<Index>(mesh.num_edges());
  const auto nt = static_cast<Index>(mesh.num_triangles());

  DualMetrics m;
  m.circumcenters.resize(nt);
  m.pieces.resize(nt);
  m.triangle_area.resize(nt);
  m.primal_edge_length.resize(ne);
  m.dual_edge_length.assign(ne, 0.0);
  m.dual_cell_area.assign(nv, 0.0);
  m.support_area.resize(ne);

  for (Index e = 0; e < ne; ++e) m.primal_edge_length[e] = mesh.edge_length(e);

  // Fixed triangle order keeps every accumulation bit-reproducible.
  for (Index t = 0; t < nt; ++t) {
    const auto pts = mesh.triangle_points(t);
    const auto& tri = mesh.triangles()[t];
    const auto& tedges = mesh.triangle_edges(t);
    m.triangle_area[t] = triangle_area(pts[0], pts[1], pts[2]);
    const Point3 c = circumcenter(pts[0], pts[1], pts[2]);
    m.circumcenters[t] = c;
    for (int i = 0; i < 3; ++i) {
      const Point3 mid = 0.5 * (pts[i] + pts[(i + 1) % 3]);
      const double piece = dual_piece_sign(mesh, t, i, c) * (c - mid).norm();
      m.pieces[t][i] = piece;
      const Index e = tedges[i];
      m.dual_edge_length[e] += piece;
      const double sector = 0.25 * m.primal_edge_length[e] * piece;
      m.dual_cell_area[tri[i]] += sector;
      m.dual_cell_area[tri[(i + 1) % 3]] += sector;
    }
  }
  for (Index e = 0; e < ne; ++e) m.support_area[e] = 0.5 * m.primal_edge_length[e] * m.dual_edge_length[e];
  m.stars = hodge_stars_unchecked(mesh, m);
  return m;
}

double signed_dual_edge_length(const SimplicialComplex2&, const DualMetrics& metrics, Index edge) {
  return metrics.dual_edge_length.at(edge);
}

double signed_dual_cell_area(const SimplicialComplex2&, const DualMetrics& metrics, Index node) {
  return metrics.dual_cell_area.at(node);
}

double support_area(const SimplicialComplex2&, const DualMetrics& metrics, Index edge) {
  return metrics.support_area.at(edge);
}

HodgeStars hodge_stars_unchecked(const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  auto reciprocal = [](double v) {
    return std::abs(v) < kZeroVolume ? std::numeric_limits<double>::infinity() : 1.0 / v;
  };
  HodgeStars s;
  const auto nv = mesh.num_nodes();
  const auto ne = mesh.num_edges();
  const auto nt = mesh.num_triangles();
  s.star0.resize(nv);
  s.star0_inv.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    s.star0[v] = metrics.dual_cell_area[v];
    s.star0_inv[v] = reciprocal(s.star0[v]);
  }
  s.star1.resize(ne);
  s.star1_inv.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    s.star1[e] = metrics.dual_edge_length[e] / metrics.primal_edge_length[e];
    s.star1_inv[e] = std::abs(metrics.dual_edge_length[e]) < kZeroVolume
                         ? std::numeric_limits<double>::infinity()
                         : metrics.primal_edge_length[e] / metrics.dual_edge_length[e];
  }
  s.star2.resize(nt);
  s.star2_inv.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    s.star2[t] = 1.0 / metrics.triangle_area[t];
    s.star2_inv[t] = metrics.triangle_area[t];
  }
  return s;
}

void require_invertible(const DualMetrics& metrics, StarKind kind) {
  if (kind == StarKind::Star0) {
    for (std::size_t v = 0; v < metrics.dual_cell_area.size(); ++v)
      if (std::abs(metrics.dual_cell_area[v]) < kZeroVolume)
        throw ZeroDualVolume(fmt::format("dual cell of node {} has signed area {:.3e}; preprocess the mesh", v,
                                         metrics.dual_cell_area[v]));
  } else if (kind == StarKind::Star1) {
    for (std::size_t e = 0; e < metrics.dual_edge_length.size(); ++e)
      if (std::abs(metrics.dual_edge_length[e]) < kZeroVolume)
        throw ZeroDualVolume(fmt::format("dual edge of edge {} has signed length {:.3e}; preprocess the mesh", e,
                                         metrics.dual_edge_length[e]));
  }
}

HodgeStars hodge_stars(const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  require_invertible(metrics, StarKind::Star0);
  require_invertible(metrics, StarKind::Star1);
  return hodge_stars_unchecked(mesh, metrics);
}

SparseMatrix boundary_closure_matrix(const SimplicialComplex2& mesh) {
  const auto& bedges = mesh.boundary_edges();
  std::vector<Triplet> trip;
  trip.reserve(2 * bedges.size());
  for (std::size_t j = 0; j < bedges.size(); ++j) {
    const Index e = bedges[j];
    const auto& inc = mesh.edge_triangles(e).front();
    const double s = mesh.triangle_edge_signs(inc.triangle)[inc.local];
    const auto& ab = mesh.edges()[e];
    trip.push_back({ab[0], static_cast<Index>(j), 0.5 * s});
    trip.push_back({ab[1], static_cast<Index>(j), 0.5 * s});
  }
  return SparseMatrix::from_triplets(static_cast<Index>(mesh.num_nodes()), static_cast<Index>(bedges.size()),
                                     std::move(trip));
}

std::vector<double> gather_boundary_edges(const SimplicialComplex2& mesh, const std::vector<double>& edge_values) {
  if (edge_values.size() != mesh.num_edges()) throw DimensionMismatch("expected one value per edge");
  std::vector<double> out;
  out.reserve(mesh.boundary_edges().size());
  for (Index e : mesh.boundary_edges()) out.push_back(edge_values[e]);
  return out;
}

void write_dual_volumes_csv(const SimplicialComplex2& mesh, const DualMetrics& metrics, std::ostream& out) {
  out << "kind,index,value\n";
  for (std::size_t v = 0; v < mesh.num_nodes(); ++v)
    out << fmt::format("dual_cell_area,{},{:.17g}\n", v, metrics.dual_cell_area[v]);
  for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    out << fmt::format("dual_edge_length,{},{:.17g}\n", e, metrics.dual_edge_length[e]);
  for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    out << fmt::format("support_area,{},{:.17g}\n", e, metrics.support_area[e]);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    out << fmt::format("triangle_area,{},{:.17g}\n", t, metrics.triangle_area[t]);
}

}  // namespace dec
