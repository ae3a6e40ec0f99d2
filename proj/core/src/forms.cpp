#include "dec/forms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "dec/errors.hpp"

namespace dec {

namespace {

// 5-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 5> kGaussNodes = {0.046910077030668018, 0.23076534494715845, 0.5, 0.7692346550528415, 0.95308992296933193};
constexpr std::array<double, 5> kGaussWeights = {0.11846344252809471, 0.2393143352496831, 0.2844444444444445, 0.2393143352496831, 0.11846344252809471};

double segment_integral(const VectorField& field, const Point3& a, const Point3& b, const Point3& dir) {
  double sum = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
    const Point3 x = a + kGaussNodes[k] * (b - a);
    sum += kGaussWeights[k] * field(x).dot(dir);
  }
  return sum;
}

}  // namespace

std::string_view to_string(Placement p) {
  switch (p) {
    case Placement::PrimalNode: return "primal_node";
    case Placement::PrimalEdge: return "primal_edge";
    case Placement::Triangle: return "triangle";
    case Placement::DualNode: return "dual_node";
    case Placement::DualEdge: return "dual_edge";
    case Placement::DualCell: return "dual_cell";
  }
  return "unknown";
}

int form_degree(Placement p) {
  switch (p) {
    case Placement::PrimalNode:
    case Placement::DualNode: return 0;
    case Placement::PrimalEdge:
    case Placement::DualEdge: return 1;
    case Placement::Triangle:
    case Placement::DualCell: return 2;
  }
  return -1;
}

std::size_t entity_count(const SimplicialComplex2& mesh, Placement p) {
  switch (p) {
    case Placement::PrimalNode:
    case Placement::DualCell: return mesh.num_nodes();
    case Placement::PrimalEdge:
    case Placement::DualEdge: return mesh.num_edges();
    case Placement::Triangle:
    case Placement::DualNode: return mesh.num_triangles();
  }
  return 0;
}

void check_form(const SimplicialComplex2& mesh, const FormField& form, Placement expected) {
  if (form.placement != expected) {
    throw PlacementMismatch(fmt::format("expected a {} form, got {}", to_string(expected), to_string(form.placement)));
  }
  if (form.values.size() != entity_count(mesh, expected)) {
    throw DimensionMismatch(fmt::format("{} form has {} values, mesh has {} entities", to_string(expected),
                                        form.values.size(), entity_count(mesh, expected)));
  }
}

FormField project_0form(const ScalarField& field, const SimplicialComplex2& mesh, const DualMetrics& metrics,
                        Placement placement) {
  FormField out{placement, {}};
  if (placement == Placement::PrimalNode) {
    out.values.reserve(mesh.num_nodes());
    for (const auto& p : mesh.nodes()) out.values.push_back(field(p));
  } else if (placement == Placement::DualNode) {
    out.values.reserve(mesh.num_triangles());
    for (const auto& c : metrics.circumcenters) out.values.push_back(field(c));
  } else {
    throw PlacementMismatch(fmt::format("0-forms cannot be placed on {}", to_string(placement)));
  }
  return out;
}

FormField project_1form(const VectorField& field, const SimplicialComplex2& mesh) {
  FormField out{Placement::PrimalEdge, std::vector<double>(mesh.num_edges())};
  for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e) {
    const auto p = mesh.edge_points(e);
    out.values[e] = segment_integral(field, p[0], p[1], p[1] - p[0]);
  }
  return out;
}

FormField project_dual_flux(const VectorField& field, const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  FormField out{Placement::DualEdge, std::vector<double>(mesh.num_edges(), 0.0)};
  for (Index t = 0; t < static_cast<Index>(mesh.num_triangles()); ++t) {
    const auto pts = mesh.triangle_points(t);
    const Point3 n = mesh.triangle_normal(t);
    const auto& te = mesh.triangle_edges(t);
    const auto& ts = mesh.triangle_edge_signs(t);
    const Point3& c = metrics.circumcenters[t];
    for (int i = 0; i < 3; ++i) {
      const Point3& p = pts[i];
      const Point3& q = pts[(i + 1) % 3];
      // Canonical edge tangent a -> b and its counterclockwise rotation.
      const Point3 tangent = (ts[i] * (q - p)).normalized();
      const Point3 dual_dir = n.cross(tangent);
      const Point3 mid = 0.5 * (p + q);
      const double piece = metrics.pieces[t][i];
      if (piece == 0.0) continue;
      // Mean of the in-plane field along the piece, times its signed length.
      double mean = 0.0;
      for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
        const Point3 x = mid + kGaussNodes[k] * (c - mid);
        Point3 v = field(x);
        v -= v.dot(n) * n;
        mean += kGaussWeights[k] * v.dot(dual_dir);
      }
      out.values[te[i]] += piece * mean;
    }
  }
  return out;
}

double l2_error(const FormField& numerical, const FormField& exact, const SimplicialComplex2& mesh,
                const DualMetrics& metrics) {
  if (numerical.placement != exact.placement) {
    throw PlacementMismatch(fmt::format("cannot compare {} with {}", to_string(numerical.placement),
                                        to_string(exact.placement)));
  }
  check_form(mesh, numerical, numerical.placement);
  check_form(mesh, exact, exact.placement);
  double sum = 0.0;
  switch (numerical.placement) {
    case Placement::PrimalNode:
      for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
        const double d = numerical.values[v] - exact.values[v];
        sum += metrics.dual_cell_area[v] * d * d;
      }
      break;
    case Placement::DualNode:
      for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const double d = numerical.values[t] - exact.values[t];
        sum += metrics.triangle_area[t] * d * d;
      }
      break;
    case Placement::PrimalEdge:
      for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        const double d = (numerical.values[e] - exact.values[e]) / metrics.primal_edge_length[e];
        sum += metrics.support_area[e] * d * d;
      }
      break;
    default:
      throw PlacementMismatch(fmt::format("no L2 norm defined for {}", to_string(numerical.placement)));
  }
  return std::sqrt(std::max(0.0, sum));
}

double l2_error_piecewise_constant(const FormField& numerical, const ScalarField& exact,
                                   const SimplicialComplex2& mesh, const DualMetrics& metrics) {
  check_form(mesh, numerical, Placement::DualNode);
  double sum = 0.0;
  for (Index t = 0; t < static_cast<Index>(mesh.num_triangles()); ++t) {
    const auto p = mesh.triangle_points(t);
    for (int i = 0; i < 3; ++i) {
      const double d = numerical.values[t] - exact(0.5 * (p[i] + p[(i + 1) % 3]));
      sum += metrics.triangle_area[t] / 3.0 * d * d;
    }
  }
  return std::sqrt(sum);
}

void write_form_csv(const FormField& form, std::ostream& out) {
  out << "index," << to_string(form.placement) << '\n';
  for (std::size_t i = 0; i < form.values.size(); ++i) out << fmt::format("{},{:.17g}\n", i, form.values[i]);
}

}  // namespace dec
