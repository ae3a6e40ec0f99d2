#include "dec/mesh_gen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "dec/errors.hpp"

namespace dec {

namespace {

using Vec2 = Eigen::Vector2d;

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when d is strictly inside the circumcircle of the counterclockwise (a, b, c).
double incircle2d(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const Vec2 ad = a - d, bd = b - d, cd = c - d;
  const double a2 = ad.squaredNorm(), b2 = bd.squaredNorm(), c2 = cd.squaredNorm();
  return ad.x() * (bd.y() * c2 - b2 * cd.y()) - ad.y() * (bd.x() * c2 - b2 * cd.x()) +
         a2 * (bd.x() * cd.y() - bd.y() * cd.x());
}

double normalized_incircle2d(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double scale = (a - c).norm() * (b - c).norm() * (a - d).norm() * (b - d).norm();
  return incircle2d(a, b, c, d) / scale;
}

struct WorkTri {
  std::array<Index, 3> v;
  std::array<Index, 3> nbr;  // nbr[i] lies across the edge opposite v[i]
  bool alive;
};

class BowyerWatson {
 public:
  explicit BowyerWatson(std::span<const Vec2> points) : pts_(points.begin(), points.end()) {
    Vec2 lo = pts_.front(), hi = pts_.front();
    for (const auto& p : pts_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec2 mid = 0.5 * (lo + hi);
    const double span = std::max(1.0, (hi - lo).maxCoeff());
    const double far = 100.0 * span;
    super_ = static_cast<Index>(pts_.size());
    pts_.push_back(mid + Vec2(-far, -far));
    pts_.push_back(mid + Vec2(2.0 * far, -far));
    pts_.push_back(mid + Vec2(-far, 2.0 * far));
    tris_.push_back({{super_, super_ + 1, super_ + 2}, {-1, -1, -1}, true});
    slot_start_.assign(pts_.size(), -1);
    slot_end_.assign(pts_.size(), -1);
    in_cavity_.assign(1, 0);
  }

  void run() {
    for (Index p = 0; p < super_; ++p) insert(p);
  }

  std::vector<Triangle> finish() {
    // Drop the super-triangle, then repair with flips.
    for (auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= super_ || t.v[1] >= super_ || t.v[2] >= super_) t.alive = false;
    }
    for (auto& t : tris_) {
      if (!t.alive) continue;
      for (auto& n : t.nbr)
        if (n >= 0 && !tris_[n].alive) n = -1;
    }
    lawson_flips();
    std::vector<Triangle> out;
    for (const auto& t : tris_)
      if (t.alive) out.push_back({t.v[0], t.v[1], t.v[2]});
    return out;
  }

 private:
  Index locate(const Vec2& p) const {
    Index t = last_;
    if (t < 0 || !tris_[t].alive) {
      for (t = 0; !tris_[t].alive; ++t) {
      }
    }
    std::size_t guard = 0;
    int rot = 0;
    while (true) {
      if (++guard > 4 * tris_.size() + 16) throw GenerationFailed("point location did not terminate");
      const auto& tri = tris_[t];
      Index next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + rot) % 3;
        if (orient2d(pts_[tri.v[(i + 1) % 3]], pts_[tri.v[(i + 2) % 3]], p) < 0.0) {
          next = tri.nbr[i];
          break;
        }
      }
      rot = (rot + 1) % 3;
      if (next < 0) return t;
      t = next;
    }
  }

  bool circum_contains(Index t, const Vec2& p) const {
    const auto& v = tris_[t].v;
    return incircle2d(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0.0;
  }

  Index new_tri() {
    if (!free_.empty()) {
      const Index t = free_.back();
      free_.pop_back();
      return t;
    }
    tris_.push_back({});
    in_cavity_.push_back(0);
    return static_cast<Index>(tris_.size() - 1);
  }

  void insert(Index pi) {
    const Vec2& p = pts_[pi];
    const Index start = locate(p);

    cavity_.clear();
    cavity_.push_back(start);
    in_cavity_[start] = 1;
    for (std::size_t k = 0; k < cavity_.size(); ++k) {
      const auto& tri = tris_[cavity_[k]];
      for (Index n : tri.nbr) {
        if (n < 0 || in_cavity_[n]) continue;
        if (circum_contains(n, p)) {
          in_cavity_[n] = 1;
          cavity_.push_back(n);
        }
      }
    }

    rim_.clear();
    for (Index t : cavity_) {
      const auto& tri = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const Index n = tri.nbr[i];
        if (n >= 0 && in_cavity_[n]) continue;
        rim_.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], n});
      }
    }
    for (Index t : cavity_) {
      in_cavity_[t] = 0;
      tris_[t].alive = false;
      free_.push_back(t);
    }

    created_.clear();
    for (const auto& r : rim_) {
      if (orient2d(pts_[r.a], pts_[r.b], p) <= 0.0) throw GenerationFailed("cavity is not star-shaped");
      const Index t = new_tri();
      tris_[t] = {{r.a, r.b, pi}, {-1, -1, r.outside}, true};
      if (r.outside >= 0) {
        auto& o = tris_[r.outside];
        for (int i = 0; i < 3; ++i) {
          // The outside triangle traverses the rim edge as (b, a).
          if (o.v[(i + 1) % 3] == r.b && o.v[(i + 2) % 3] == r.a) o.nbr[i] = t;
        }
      }
      slot_start_[r.a] = t;
      slot_end_[r.b] = t;
      created_.push_back(t);
    }
    for (Index t : created_) {
      auto& tri = tris_[t];
      const Index a = tri.v[0], b = tri.v[1];
      tri.nbr[0] = slot_start_[b];  // across (b, p)
      tri.nbr[1] = slot_end_[a];    // across (p, a)
    }
    for (Index t : created_) {
      slot_start_[tris_[t].v[0]] = -1;
      slot_end_[tris_[t].v[1]] = -1;
    }
    last_ = created_.back();
  }

  void lawson_flips() {
    for (int pass = 0; pass < 100; ++pass) {
      bool flipped = false;
      for (Index t = 0; t < static_cast<Index>(tris_.size()); ++t) {
        if (!tris_[t].alive) continue;
        for (int i = 0; i < 3; ++i) {
          if (try_flip(t, i)) {
            flipped = true;
            break;
          }
        }
      }
      if (!flipped) return;
    }
    throw GenerationFailed("flip repair did not converge");
  }

  bool try_flip(Index t, int i) {
    const Index u = tris_[t].nbr[i];
    if (u < 0) return false;
    const auto tv = tris_[t].v;
    const Index a = tv[i], b = tv[(i + 1) % 3], c = tv[(i + 2) % 3];
    int j = -1;
    for (int k = 0; k < 3; ++k)
      if (tris_[u].nbr[k] == t) j = k;
    if (j < 0) throw GenerationFailed("inconsistent adjacency");
    const Index d = tris_[u].v[j];
    if (normalized_incircle2d(pts_[b], pts_[c], pts_[a], pts_[d]) <= kIncircleTolerance) return false;
    if (orient2d(pts_[a], pts_[b], pts_[d]) <= 0.0 || orient2d(pts_[a], pts_[d], pts_[c]) <= 0.0) return false;

    const Index n_ca = tris_[t].nbr[(i + 1) % 3];
    const Index n_ab = tris_[t].nbr[(i + 2) % 3];
    const Index n_bd = tris_[u].nbr[(j + 1) % 3];
    const Index n_dc = tris_[u].nbr[(j + 2) % 3];
    tris_[t] = {{a, b, d}, {n_bd, u, n_ab}, true};
    tris_[u] = {{a, d, c}, {n_dc, n_ca, t}, true};
    auto repoint = [&](Index n, Index from, Index to) {
      if (n < 0) return;
      for (auto& x : tris_[n].nbr)
        if (x == from) x = to;
    };
    repoint(n_bd, u, t);
    repoint(n_ca, t, u);
    return true;
  }

  std::vector<Vec2> pts_;
  Index super_ = 0;
  std::vector<WorkTri> tris_;
  std::vector<Index> free_;
  std::vector<std::uint8_t> in_cavity_;
  std::vector<Index> cavity_;
  struct RimEdge {
    Index a, b, outside;
  };
  std::vector<RimEdge> rim_;
  std::vector<Index> created_;
  std::vector<Index> slot_start_, slot_end_;
  Index last_ = 0;
};

double signed_doubled_area_xy(const Point3& a, const Point3& b, const Point3& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

}  // namespace

std::vector<Triangle> delaunay_triangulate(std::span<const Eigen::Vector2d> points) {
  if (points.size() < 3) throw GenerationFailed("need at least three points");
  BowyerWatson bw(points);
  bw.run();
  return bw.finish();
}

SimplicialComplex2 delaunay_unit_square(int target_triangle_count, std::uint64_t seed) {
  if (target_triangle_count < 2) throw GenerationFailed("target triangle count must be at least 2");
  const int cells = std::max(1, static_cast<int>(std::lround(std::sqrt(target_triangle_count / 2.0))));
  const double h = 1.0 / cells;

  constexpr int kAttempts = 5;
  std::string last_error;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> jitter(-0.3 * h, 0.3 * h);
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(static_cast<std::size_t>(cells + 1) * (cells + 1));
    for (int j = 0; j <= cells; ++j) {
      for (int i = 0; i <= cells; ++i) {
        double x = i == cells ? 1.0 : i * h;
        double y = j == cells ? 1.0 : j * h;
        const bool interior = i > 0 && i < cells && j > 0 && j < cells;
        if (interior) {
          x += jitter(rng);
          y += jitter(rng);
        }
        pts.emplace_back(x, y);
      }
    }
    try {
      auto tris = delaunay_triangulate(pts);
      std::vector<Point3> nodes;
      nodes.reserve(pts.size());
      for (const auto& p : pts) nodes.emplace_back(p.x(), p.y(), 0.0);
      auto mesh = SimplicialComplex2::build(std::move(nodes), std::move(tris));
      if (std::abs(mesh.total_area() - 1.0) > 1e-12) throw GenerationFailed("triangulation does not cover the square");
      if (mesh.num_triangles() != static_cast<std::size_t>(2 * cells * cells))
        throw GenerationFailed("unexpected triangle count");
      for (Index e = 0; e < static_cast<Index>(mesh.num_edges()); ++e)
        if (is_non_delaunay_edge(mesh, e)) throw GenerationFailed("non-Delaunay edge after repair");
      return mesh;
    } catch (const Error& err) {
      last_error = err.what();
    }
  }
  throw GenerationFailed("Delaunay generation failed after retries: " + last_error);
}

SimplicialComplex2 structured_grid(int cells_per_side) {
  if (cells_per_side < 1) throw GenerationFailed("grid needs at least one cell");
  const int n = cells_per_side;
  const double h = 1.0 / n;
  std::vector<Point3> nodes;
  nodes.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) nodes.emplace_back(i == n ? 1.0 : i * h, j == n ? 1.0 : j * h, 0.0);
  auto id = [n](int i, int j) { return static_cast<Index>(j * (n + 1) + i); };
  std::vector<Triangle> tris;
  tris.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return SimplicialComplex2::build(std::move(nodes), std::move(tris));
}

SimplicialComplex2 distort_to_non_delaunay(const SimplicialComplex2& mesh, const DistortionSpec& spec) {
  if (!(spec.target_edge_ratio >= 0.0 && spec.target_edge_ratio < 0.5))
    throw TargetUnreachable("target edge ratio must lie in [0, 0.5)");
  if (!(spec.squeeze_factor > 0.0 && spec.squeeze_factor < 1.0))
    throw TargetUnreachable("squeeze factor must lie in (0, 1)");
  if (mesh.is_periodic()) throw TargetUnreachable("distortion requires a non-periodic mesh");
  const auto& nodes0 = mesh.nodes();
  for (const auto& p : nodes0)
    if (p.z() != nodes0.front().z()) throw TargetUnreachable("distortion requires a flat mesh");
  if (spec.target_edge_ratio == 0.0) return mesh;

  const auto ne = static_cast<Index>(mesh.num_edges());
  const double total = static_cast<double>(ne);
  const auto lower = static_cast<std::size_t>(std::ceil(spec.target_edge_ratio * total - 1e-9));
  const auto upper = static_cast<std::size_t>(std::floor((spec.target_edge_ratio + 0.01) * total + 1e-9));
  const std::size_t interior = mesh.num_edges() - mesh.boundary_edges().size();
  if (lower > interior) throw TargetUnreachable("not enough interior edges for the target ratio");

  std::vector<Point3> pos = nodes0;

  auto edge_nd = [&](Index e) -> bool {
    const auto inc = mesh.edge_triangles(e);
    if (inc.size() != 2) return false;
    const auto& t0 = mesh.triangles()[inc[0].triangle];
    const auto& t1 = mesh.triangles()[inc[1].triangle];
    const int s0 = inc[0].local, s1 = inc[1].local;
    return normalized_incircle(pos[t0[s0]], pos[t0[(s0 + 1) % 3]], pos[t0[(s0 + 2) % 3]], pos[t1[(s1 + 2) % 3]]) >
           kIncircleTolerance;
  };
  auto apex = [&](const EdgeIncidence& inc) { return mesh.triangles()[inc.triangle][(inc.local + 2) % 3]; };
  // Doubled area floor for moved triangles.
  const double min_doubled_area = 100.0 * kDegenerateDoubledArea;
  double max_edge0 = 0.0;
  for (const auto& ed : mesh.edges()) max_edge0 = std::max(max_edge0, (pos[ed[1]] - pos[ed[0]]).norm());
  const double edge_cap = spec.max_edge_growth * max_edge0;
  auto too_long = [&](const Triangle& tri) {
    for (int i = 0; i < 3; ++i)
      if ((pos[tri[(i + 1) % 3]] - pos[tri[i]]).norm() > edge_cap) return true;
    return false;
  };

  std::vector<std::uint8_t> flag(ne, 0);
  std::size_t count = 0;
  for (Index e = 0; e < ne; ++e) {
    flag[e] = edge_nd(e) ? 1 : 0;
    count += flag[e];
  }

  std::vector<Index> candidates;
  for (Index e = 0; e < ne; ++e)
    if (!mesh.is_boundary_edge(e)) candidates.push_back(e);

  std::mt19937_64 rng(spec.rng_seed);
  std::vector<Index> touched_edges;
  std::vector<Index> movers;

  for (int pass = 0; pass < spec.max_passes && count < lower; ++pass) {
    std::shuffle(candidates.begin(), candidates.end(), rng);
    for (Index e : candidates) {
      if (count >= lower) break;
      if (flag[e]) continue;
      const auto inc = mesh.edge_triangles(e);
      movers.clear();
      for (const auto& i : inc) {
        const Index v = apex(i);
        if (!mesh.is_boundary_node(v)) movers.push_back(v);
      }
      if (movers.empty()) continue;

      const auto& ab = mesh.edges()[e];
      const Point3 mid = 0.5 * (pos[ab[0]] + pos[ab[1]]);
      std::vector<Point3> saved;
      for (Index v : movers) saved.push_back(pos[v]);
      auto rollback = [&] {
        for (std::size_t k = 0; k < movers.size(); ++k) pos[movers[k]] = saved[k];
      };

      bool inverted = false;
      bool achieved = false;
      for (int step = 0; step < spec.max_steps_per_edge && !inverted && !achieved; ++step) {
        for (Index v : movers) pos[v] += spec.squeeze_factor * (mid - pos[v]);
        for (Index v : movers) {
          for (Index t : mesh.node_triangles(v)) {
            const auto& tri = mesh.triangles()[t];
            if (signed_doubled_area_xy(pos[tri[0]], pos[tri[1]], pos[tri[2]]) <= min_doubled_area ||
                aspect_ratio(pos[tri[0]], pos[tri[1]], pos[tri[2]]) > spec.max_aspect_ratio || too_long(tri))
              inverted = true;
          }
        }
        if (!inverted) achieved = edge_nd(e);
      }
      if (inverted || !achieved) {
        rollback();
        continue;
      }

      touched_edges.clear();
      for (Index v : movers)
        for (Index t : mesh.node_triangles(v))
          for (Index te : mesh.triangle_edges(t)) touched_edges.push_back(te);
      std::sort(touched_edges.begin(), touched_edges.end());
      touched_edges.erase(std::unique(touched_edges.begin(), touched_edges.end()), touched_edges.end());
      std::ptrdiff_t delta = 0;
      std::vector<std::uint8_t> fresh(touched_edges.size());
      for (std::size_t k = 0; k < touched_edges.size(); ++k) {
        fresh[k] = edge_nd(touched_edges[k]) ? 1 : 0;
        delta += static_cast<std::ptrdiff_t>(fresh[k]) - static_cast<std::ptrdiff_t>(flag[touched_edges[k]]);
      }
      const auto next = static_cast<std::ptrdiff_t>(count) + delta;
      if (next > static_cast<std::ptrdiff_t>(upper) || delta <= 0) {
        rollback();
        continue;
      }
      for (std::size_t k = 0; k < touched_edges.size(); ++k) flag[touched_edges[k]] = fresh[k];
      count = static_cast<std::size_t>(next);
    }
  }
  if (count < lower || count > upper) {
    throw TargetUnreachable("reached " + std::to_string(count) + " non-Delaunay edges, wanted [" +
                            std::to_string(lower) + ", " + std::to_string(upper) + "]");
  }
  SimplicialComplex2 out = mesh;
  out.set_node_positions(std::move(pos));
  return out;
}

SimplicialComplex2 midpoint_subdivide(const SimplicialComplex2& mesh) {
  const auto nv = static_cast<Index>(mesh.num_nodes());
  const auto ne = static_cast<Index>(mesh.num_edges());
  std::vector<Point3> nodes = mesh.nodes();
  nodes.reserve(nodes.size() + mesh.num_edges());
  for (Index e = 0; e < ne; ++e) {
    const auto p = mesh.edge_points(e);
    nodes.push_back(0.5 * (p[0] + p[1]));
  }
  std::vector<Triangle> tris;
  tris.reserve(4 * mesh.num_triangles());
  std::vector<std::array<Point3, 3>> corners;
  for (Index t = 0; t < static_cast<Index>(mesh.num_triangles()); ++t) {
    const auto& v = mesh.triangles()[t];
    const auto& te = mesh.triangle_edges(t);
    const Index m01 = nv + te[0], m12 = nv + te[1], m20 = nv + te[2];
    tris.push_back({v[0], m01, m20});
    tris.push_back({v[1], m12, m01});
    tris.push_back({v[2], m20, m12});
    tris.push_back({m01, m12, m20});
    if (mesh.is_periodic()) {
      const auto& c = mesh.corners()[t];
      const Point3 c01 = 0.5 * (c[0] + c[1]), c12 = 0.5 * (c[1] + c[2]), c20 = 0.5 * (c[2] + c[0]);
      corners.push_back({c[0], c01, c20});
      corners.push_back({c[1], c12, c01});
      corners.push_back({c[2], c20, c12});
      corners.push_back({c01, c12, c20});
    }
  }
  return SimplicialComplex2::build(std::move(nodes), std::move(tris), std::move(corners));
}

double sinusoidal_height(double x, double y) {
  constexpr double pi = std::numbers::pi;
  return 0.1 * std::sin(4.0 * pi * x) * std::cos(4.0 * pi * y);
}

SimplicialComplex2 lift_sinusoidal(const SimplicialComplex2& mesh) {
  std::vector<Point3> nodes = mesh.nodes();
  for (auto& p : nodes) p.z() = sinusoidal_height(p.x(), p.y());
  std::vector<std::array<Point3, 3>> corners = mesh.corners();
  for (auto& c : corners)
    for (auto& p : c) p.z() = sinusoidal_height(p.x(), p.y());
  return SimplicialComplex2::build(std::move(nodes), mesh.triangles(), std::move(corners));
}

SimplicialComplex2 periodic_identify(const SimplicialComplex2& mesh) {
  constexpr double tol = 1e-9;
  if (mesh.is_periodic()) throw MismatchedBoundary("mesh is already periodic");
  const auto nv = static_cast<Index>(mesh.num_nodes());
  const auto& nodes = mesh.nodes();

  auto key = [](double x, double y) { return std::make_pair(std::llround(x * 1e6), std::llround(y * 1e6)); };
  std::map<std::pair<long long, long long>, Index> lookup;
  for (Index v = 0; v < nv; ++v) {
    const auto& p = nodes[v];
    if (p.x() < 1.0 - tol && p.y() < 1.0 - tol) lookup.emplace(key(p.x(), p.y()), v);
  }

  std::vector<Index> rep(nv, -1);
  for (Index v = 0; v < nv; ++v) {
    const auto& p = nodes[v];
    double x = p.x(), y = p.y();
    if (x >= 1.0 - tol) x -= 1.0;
    if (y >= 1.0 - tol) y -= 1.0;
    const auto it = lookup.find(key(x, y));
    if (it == lookup.end() || std::hypot(nodes[it->second].x() - x, nodes[it->second].y() - y) > tol) {
      throw MismatchedBoundary("node " + std::to_string(v) + " has no periodic partner");
    }
    rep[v] = it->second;
  }
  for (Index v : mesh.boundary_nodes()) {
    const auto& p = nodes[v];
    const bool on_side = p.x() <= tol || p.y() <= tol || p.x() >= 1.0 - tol || p.y() >= 1.0 - tol;
    if (!on_side) throw MismatchedBoundary("boundary node " + std::to_string(v) + " is not on the unit square");
  }

  std::vector<Index> compact(nv, -1);
  std::vector<Point3> merged;
  for (Index v = 0; v < nv; ++v) {
    if (rep[v] != v) continue;
    compact[v] = static_cast<Index>(merged.size());
    merged.push_back(nodes[v]);
  }
  std::vector<Triangle> tris;
  std::vector<std::array<Point3, 3>> corners;
  for (Index t = 0; t < static_cast<Index>(mesh.num_triangles()); ++t) {
    const auto& tri = mesh.triangles()[t];
    tris.push_back({compact[rep[tri[0]]], compact[rep[tri[1]]], compact[rep[tri[2]]]});
    corners.push_back(mesh.triangle_points(t));
  }
  auto out = SimplicialComplex2::build(std::move(merged), std::move(tris), std::move(corners));
  if (!out.boundary_edges().empty()) throw MismatchedBoundary("identified mesh still has boundary edges");
  return out;
}

}  // namespace dec
