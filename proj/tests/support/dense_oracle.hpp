#pragma once

// Brute-force dense assembly of the DEC operators, written directly from the
// geometric definitions so tests can compare the sparse library against it.
// Only the node, triangle and canonical edge lists of the mesh are used.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dec/mesh.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

inline Vector2d xy(const dec::Point3& p) { return {p.x(), p.y()}; }

// Planar circumcenter from the two equidistance equations.
inline Vector2d circumcenter(const Vector2d& a, const Vector2d& b, const Vector2d& c) {
  Eigen::Matrix2d m;
  m << 2 * (b - a).transpose(), 2 * (c - a).transpose();
  const Vector2d rhs(b.squaredNorm() - a.squaredNorm(), c.squaredNorm() - a.squaredNorm());
  return m.fullPivLu().solve(rhs);
}

// Dense brute-force geometry and operators of a planar mesh.
struct Dense {
  int nv = 0, ne = 0, nt = 0;
  MatrixXd d0, d1;
  VectorXd edge_len, dual_len, dual_area, tri_area, support;
  MatrixXd s0, s1, s2, s0inv, s1inv;
  std::vector<bool> boundary_edge;

  explicit Dense(const dec::SimplicialComplex2& mesh) {
    nv = static_cast<int>(mesh.num_nodes());
    ne = static_cast<int>(mesh.num_edges());
    nt = static_cast<int>(mesh.num_triangles());
    const auto& P = mesh.nodes();
    const auto& E = mesh.edges();
    const auto& T = mesh.triangles();
    auto find_edge = [&](int a, int b) {
      for (int e = 0; e < ne; ++e)
        if ((E[e][0] == a && E[e][1] == b) || (E[e][0] == b && E[e][1] == a)) return e;
      throw std::logic_error("edge not found");
    };

    d0 = MatrixXd::Zero(ne, nv);
    for (int e = 0; e < ne; ++e) {
      d0(e, E[e][0]) = -1;
      d0(e, E[e][1]) = 1;
    }
    d1 = MatrixXd::Zero(nt, ne);
    edge_len = VectorXd::Zero(ne);
    dual_len = VectorXd::Zero(ne);
    dual_area = VectorXd::Zero(nv);
    tri_area = VectorXd::Zero(nt);
    std::vector<int> uses(ne, 0);
    for (int e = 0; e < ne; ++e) edge_len(e) = (xy(P[E[e][1]]) - xy(P[E[e][0]])).norm();

    for (int t = 0; t < nt; ++t) {
      const Vector2d a = xy(P[T[t][0]]), b = xy(P[T[t][1]]), c = xy(P[T[t][2]]);
      tri_area(t) = 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
      const Vector2d cc = circumcenter(a, b, c);
      for (int i = 0; i < 3; ++i) {
        const int p = T[t][i], q = T[t][(i + 1) % 3], o = T[t][(i + 2) % 3];
        const int e = find_edge(p, q);
        d1(t, e) = p < q ? 1 : -1;
        ++uses[e];
        const Vector2d m = 0.5 * (xy(P[p]) + xy(P[q]));
        Vector2d n(-(xy(P[q]) - xy(P[p])).y(), (xy(P[q]) - xy(P[p])).x());
        n.normalize();
        if (n.dot(xy(P[o]) - m) < 0) n = -n;  // inward
        const double piece = n.dot(cc - m);
        dual_len(e) += piece;
        // Two elementary sectors (vertex, midpoint, circumcenter), one per endpoint.
        dual_area(p) += 0.25 * edge_len(e) * piece;
        dual_area(q) += 0.25 * edge_len(e) * piece;
      }
    }
    boundary_edge.assign(ne, false);
    for (int e = 0; e < ne; ++e) boundary_edge[e] = uses[e] == 1;
    support = 0.5 * edge_len.cwiseProduct(dual_len);

    s0 = dual_area.asDiagonal();
    s1 = dual_len.cwiseQuotient(edge_len).asDiagonal();
    s2 = tri_area.cwiseInverse().asDiagonal();
    s0inv = dual_area.cwiseInverse().asDiagonal();
    VectorXd s1i = VectorXd::Zero(ne);
    for (int e = 0; e < ne; ++e)
      if (std::abs(dual_len(e)) > 1e-13) s1i(e) = edge_len(e) / dual_len(e);
    s1inv = s1i.asDiagonal();
  }

  MatrixXd stiffness() const { return -d0.transpose() * s1 * d0; }
  MatrixXd primal0() const { return s0inv * stiffness(); }
  MatrixXd dual0() const {
    MatrixXd d1p = d1;
    for (int e = 0; e < ne; ++e)
      if (boundary_edge[e]) d1p.col(e).setZero();
    return -s2 * d1p * s1inv * d1p.transpose();
  }
  MatrixXd one_form() const {
    return d0 * s0inv * (-d0.transpose()) * s1 - s1inv * d1.transpose() * s2 * d1;
  }

  // Dense solve of A x = b with x[pin] = value: the pin row is dropped and the
  // pin column moved to the right-hand side.
  static VectorXd solve_pinned(const MatrixXd& a, const VectorXd& b, int pin, double value) {
    const int n = static_cast<int>(a.rows());
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
      if (i != pin) keep.push_back(i);
    MatrixXd r(n - 1, n - 1);
    VectorXd rhs(n - 1);
    for (int i = 0; i < n - 1; ++i) {
      rhs(i) = b(keep[i]) - a(keep[i], pin) * value;
      for (int j = 0; j < n - 1; ++j) r(i, j) = a(keep[i], keep[j]);
    }
    const VectorXd y = r.fullPivLu().solve(rhs);
    VectorXd x(n);
    x(pin) = value;
    for (int i = 0; i < n - 1; ++i) x(keep[i]) = y(i);
    return x;
  }
};

inline double max_abs_diff(const MatrixXd& a, const MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

// All-pairs empty-circumcircle check: no node strictly inside any triangle's
// circumcircle (relative tolerance on the squared radius).
inline bool brute_force_delaunay(const dec::SimplicialComplex2& mesh, double rel_tol = 1e-9) {
  const auto& P = mesh.nodes();
  for (const auto& t : mesh.triangles()) {
    const Vector2d c = circumcenter(xy(P[t[0]]), xy(P[t[1]]), xy(P[t[2]]));
    const double r2 = (xy(P[t[0]]) - c).squaredNorm();
    for (std::size_t v = 0; v < P.size(); ++v) {
      if (static_cast<int>(v) == t[0] || static_cast<int>(v) == t[1] || static_cast<int>(v) == t[2]) continue;
      if ((xy(P[v]) - c).squaredNorm() < r2 * (1 - rel_tol)) return false;
    }
  }
  return true;
}

}  // namespace oracle
