#include "dec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include <Eigen/OrderingMethods>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include "dec/errors.hpp"

namespace dec {

namespace {

std::vector<Index> amd_order(const SparseMatrix& a) {
  using ColMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(a.nnz());
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c : a.row_cols(r)) trip.emplace_back(r, c, 1.0);
  ColMat pattern(a.rows(), a.cols());
  pattern.setFromTriplets(trip.begin(), trip.end());
  pattern.makeCompressed();
  Eigen::AMDOrdering<int> amd;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
  amd(pattern, perm);
  std::vector<Index> order(a.rows());
  for (Index k = 0; k < a.rows(); ++k) order[k] = perm.indices()[k];
  return order;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

void SparseLU::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("LU requires a square matrix");
  const Index n = a.rows();
  n_ = n;

  // Column access to A: rows of A^T.
  const SparseMatrix at = a.transpose();

  if (options_.reorder) {
    q_ = amd_order(a);
  } else {
    q_.resize(n);
    std::iota(q_.begin(), q_.end(), 0);
  }

  pinv_.assign(n, -1);
  lp_.assign(1, 0);
  up_.assign(1, 0);
  li_.clear();
  lx_.clear();
  ui_.clear();
  ux_.clear();
  const std::size_t guess = 4 * a.nnz() + static_cast<std::size_t>(n);
  li_.reserve(guess);
  lx_.reserve(guess);
  ui_.reserve(guess);
  ux_.reserve(guess);

  std::vector<double> x(n, 0.0);
  std::vector<Index> xi(n);          // reach, stored in xi[top..n)
  std::vector<Index> stack(n);       // dfs node stack
  std::vector<Index> pstack(n);      // dfs resume position
  std::vector<Index> visited(n, -1); // stamp = current column

  for (Index k = 0; k < n; ++k) {
    const Index col = q_[k];
    const auto a_rows = at.row_cols(col);
    const auto a_vals = at.row_values(col);

    // Reach of the column's pattern in the graph of L.
    Index top = n;
    for (Index start : a_rows) {
      if (visited[start] == k) continue;
      Index head = 0;
      stack[0] = start;
      while (head >= 0) {
        const Index j = stack[head];
        const Index jcol = pinv_[j];
        if (visited[j] != k) {
          visited[j] = k;
          pstack[head] = jcol < 0 ? 0 : lp_[jcol] + 1;
        }
        bool done = true;
        if (jcol >= 0) {
          const Index end = lp_[jcol + 1];
          for (Index p = pstack[head]; p < end; ++p) {
            const Index i = li_[p];
            if (visited[i] == k) continue;
            pstack[head] = p + 1;
            stack[++head] = i;
            done = false;
            break;
          }
        }
        if (done) {
          --head;
          xi[--top] = j;
        }
      }
    }

    // Sparse triangular solve x = L \ A(:, col).
    for (Index p = top; p < n; ++p) x[xi[p]] = 0.0;
    double col_max = 0.0;
    for (std::size_t p = 0; p < a_rows.size(); ++p) {
      x[a_rows[p]] = a_vals[p];
      col_max = std::max(col_max, std::abs(a_vals[p]));
    }
    for (Index p = top; p < n; ++p) {
      const Index j = xi[p];
      const Index jcol = pinv_[j];
      if (jcol < 0) continue;
      const double xj = x[j];  // unit diagonal
      for (Index q = lp_[jcol] + 1; q < lp_[jcol + 1]; ++q) x[li_[q]] -= lx_[q] * xj;
    }

    // Pivot selection; pivotal rows go to U.
    Index ipiv = -1;
    double best = -1.0;
    for (Index p = top; p < n; ++p) {
      const Index i = xi[p];
      if (pinv_[i] < 0) {
        const double t = std::abs(x[i]);
        if (t > best) {
          best = t;
          ipiv = i;
        }
      } else if (x[i] != 0.0) {
        ui_.push_back(pinv_[i]);
        ux_.push_back(x[i]);
      }
    }
    if (ipiv < 0 || best <= options_.singular_tolerance * col_max || best == 0.0) {
      throw SingularMatrix("zero pivot in column " + std::to_string(col) + " (step " + std::to_string(k) + " of " +
                           std::to_string(n) + ")");
    }
    if (pinv_[col] < 0 && visited[col] == k && std::abs(x[col]) >= options_.pivot_threshold * best) ipiv = col;

    const double pivot = x[ipiv];
    ui_.push_back(k);
    ux_.push_back(pivot);
    up_.push_back(static_cast<Index>(ui_.size()));
    pinv_[ipiv] = k;

    li_.push_back(ipiv);
    lx_.push_back(1.0);
    for (Index p = top; p < n; ++p) {
      const Index i = xi[p];
      if (pinv_[i] < 0 && x[i] != 0.0) {
        li_.push_back(i);
        lx_.push_back(x[i] / pivot);
      }
      x[i] = 0.0;
    }
    lp_.push_back(static_cast<Index>(li_.size()));
  }

  // Row indices of L in pivot order.
  for (auto& i : li_) i = pinv_[i];
}

std::vector<double> SparseLU::solve(std::span<const double> b) const {
  if (static_cast<Index>(b.size()) != n_) throw DimensionMismatch("LU solve: rhs length");
  std::vector<double> y(n_);
  for (Index i = 0; i < n_; ++i) y[pinv_[i]] = b[i];
  for (Index j = 0; j < n_; ++j) {
    const double yj = y[j];
    if (yj == 0.0) continue;
    for (Index p = lp_[j] + 1; p < lp_[j + 1]; ++p) y[li_[p]] -= lx_[p] * yj;
  }
  for (Index j = n_ - 1; j >= 0; --j) {
    y[j] /= ux_[up_[j + 1] - 1];
    const double yj = y[j];
    if (yj == 0.0) continue;
    for (Index p = up_[j]; p < up_[j + 1] - 1; ++p) y[ui_[p]] -= ux_[p] * yj;
  }
  std::vector<double> x(n_);
  for (Index k = 0; k < n_; ++k) x[q_[k]] = y[k];
  return x;
}

std::vector<double> SparseLU::solve_transpose(std::span<const double> b) const {
  if (static_cast<Index>(b.size()) != n_) throw DimensionMismatch("LU solve: rhs length");
  std::vector<double> y(n_);
  for (Index k = 0; k < n_; ++k) y[k] = b[q_[k]];
  for (Index j = 0; j < n_; ++j) {
    double s = y[j];
    for (Index p = up_[j]; p < up_[j + 1] - 1; ++p) s -= ux_[p] * y[ui_[p]];
    y[j] = s / ux_[up_[j + 1] - 1];
  }
  for (Index j = n_ - 1; j >= 0; --j) {
    double s = y[j];
    for (Index p = lp_[j] + 1; p < lp_[j + 1]; ++p) s -= lx_[p] * y[li_[p]];
    y[j] = s;
  }
  std::vector<double> x(n_);
  for (Index i = 0; i < n_; ++i) x[i] = y[pinv_[i]];
  return x;
}

LinearSystem apply_pin(const LinearSystem& system) {
  if (!system.pinned) return system;
  const auto [r, value] = *system.pinned;
  const SparseMatrix& a = system.matrix;
  if (r < 0 || r >= a.rows()) throw DimensionMismatch("pinned index out of range");
  LinearSystem out;
  out.rhs = system.rhs;
  std::vector<Triplet> trip;
  trip.reserve(a.nnz() + 1);
  for (Index i = 0; i < a.rows(); ++i) {
    if (i == r) continue;
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] == r)
        out.rhs[i] -= vals[k] * value;
      else
        trip.push_back({i, cols[k], vals[k]});
    }
  }
  trip.push_back({r, r, 1.0});
  out.rhs[r] = value;
  out.matrix = SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(trip));
  return out;
}

double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  const auto ax = spmv(a, x);
  double rn = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) rn += (ax[i] - b[i]) * (ax[i] - b[i]);
  const double bn = norm2(b);
  return bn == 0.0 ? std::sqrt(rn) : std::sqrt(rn) / bn;
}

std::vector<double> row_equilibration(const SparseMatrix& a) {
  std::vector<double> scale(a.rows(), 1.0);
  for (Index r = 0; r < a.rows(); ++r) {
    double m = 0.0;
    for (double v : a.row_values(r)) m = std::max(m, std::abs(v));
    if (m > 0.0) scale[r] = 1.0 / m;
  }
  return scale;
}

double equilibrated_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  const auto scale = row_equilibration(a);
  const auto ax = spmv(a, x);
  double rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double r = scale[i] * (ax[i] - b[i]);
    rn += r * r;
    bn += scale[i] * b[i] * scale[i] * b[i];
  }
  return bn == 0.0 ? std::sqrt(rn) : std::sqrt(rn / bn);
}

std::vector<double> solve(const LinearSystem& system) {
  if (system.matrix.rows() != system.matrix.cols()) throw DimensionMismatch("solve: matrix not square");
  if (static_cast<Index>(system.rhs.size()) != system.matrix.rows()) throw DimensionMismatch("solve: rhs length");
  const LinearSystem pinned = apply_pin(system);
  // Work on R A x = R b with R scaling every row to unit max-norm.
  const auto scale = row_equilibration(pinned.matrix);
  const SparseMatrix a = diagonal_scale(scale, pinned.matrix, {});
  std::vector<double> b(pinned.rhs.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = scale[i] * pinned.rhs[i];

  const SparseLU lu(a);
  auto x = lu.solve(b);
  double res = relative_residual(a, x, b);
  for (int step = 0; step < 3 && res > kResidualTolerance; ++step) {
    const auto ax = spmv(a, x);
    std::vector<double> r(ax.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - ax[i];
    const auto dx = lu.solve(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    res = relative_residual(a, x, b);
  }
  if (!(res <= kResidualTolerance)) {
    throw InaccurateSolve(fmt::format("relative residual {:.3e} exceeds tolerance {:.0e}", res, kResidualTolerance));
  }
  return x;
}

double condition_number(const SparseMatrix& a, CondMode mode) {
  if (a.rows() != a.cols()) throw DimensionMismatch("condition number requires a square matrix");
  const Index n = a.rows();
  if (n == 0) throw DimensionMismatch("empty matrix");

  if (mode == CondMode::DenseSvd) {
    if (n > kDenseSvdMaxRows) throw DimensionMismatch("dense SVD limited to " + std::to_string(kDenseSvdMaxRows) + " rows");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a.to_dense());
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (!(smin > 1e-300)) throw SingularMatrix("smallest singular value is zero");
    return s(0) / smin;
  }

  std::vector<double> start(n);
  for (Index i = 0; i < n; ++i) start[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  auto normalize = [](std::vector<double>& v) {
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
    return nv;
  };
  constexpr int kMaxIter = 300;
  constexpr double kRelTol = 1e-9;

  // sigma_max: power iteration on A^T A.
  double smax = 0.0;
  {
    auto v = start;
    normalize(v);
    for (int it = 0; it < kMaxIter; ++it) {
      auto w = spmv(a, v);
      const double est = norm2(w);
      v = spmv_transpose(a, w);
      if (normalize(v) == 0.0) break;
      const bool converged = std::abs(est - smax) <= kRelTol * est;
      smax = est;
      if (converged) break;
    }
  }

  // 1 / sigma_min: power iteration on A^{-1} A^{-T}.
  const SparseLU lu(a);
  double inv = 0.0;
  {
    auto v = start;
    normalize(v);
    for (int it = 0; it < kMaxIter; ++it) {
      auto w = lu.solve(v);
      const double est = norm2(w);
      v = lu.solve_transpose(w);
      normalize(v);
      const bool converged = std::abs(est - inv) <= kRelTol * est;
      inv = est;
      if (converged) break;
    }
  }
  if (!(inv < 1e300)) throw SingularMatrix("smallest singular value is zero");
  return smax * inv;
}

}  // namespace dec
