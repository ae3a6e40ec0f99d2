#include "dec/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "dec/errors.hpp"
#include "dec/mesh_io.hpp"

namespace dec {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}

}  // namespace

SparseMatrix::SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw DimensionMismatch("triplet index out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m(rows, cols);
  std::size_t i = 0;
  while (i < triplets.size()) {
    const Index r = triplets[i].row;
    const Index c = triplets[i].col;
    double v = 0.0;
    while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) v += triplets[i++].value;
    if (v != 0.0) {
      m.col_idx_.push_back(c);
      m.values_.push_back(v);
      ++m.row_ptr_[r + 1];
    }
  }
  for (Index r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<double> ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> diag) {
  const auto n = static_cast<Index>(diag.size());
  SparseMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    if (diag[i] != 0.0) {
      m.col_idx_.push_back(i);
      m.values_.push_back(diag[i]);
    }
    m.row_ptr_[i + 1] = static_cast<Index>(m.values_.size());
  }
  return m;
}

std::span<const Index> SparseMatrix::row_cols(Index r) const {
  return {col_idx_.data() + row_ptr_[r], static_cast<std::size_t>(row_ptr_[r + 1] - row_ptr_[r])};
}

std::span<const double> SparseMatrix::row_values(Index r) const {
  return {values_.data() + row_ptr_[r], static_cast<std::size_t>(row_ptr_[r + 1] - row_ptr_[r])};
}

double SparseMatrix::coeff(Index r, Index c) const {
  const auto cols = row_cols(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_ptr_[r] + (it - cols.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  for (Index c : col_idx_) ++t.row_ptr_[c + 1];
  for (Index c = 0; c < cols_; ++c) t.row_ptr_[c + 1] += t.row_ptr_[c];
  std::vector<Index> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const Index dst = next[col_idx_[k]]++;
      t.col_idx_[dst] = r;
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_idx_[k]) = values_[k];
  return d;
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense) {
  std::vector<Triplet> trip;
  for (Index r = 0; r < dense.rows(); ++r)
    for (Index c = 0; c < dense.cols(); ++c)
      if (dense(r, c) != 0.0) trip.push_back({r, c, dense(r, c)});
  return from_triplets(static_cast<Index>(dense.rows()), static_cast<Index>(dense.cols()), std::move(trip));
}

SparseMatrix SparseMatrix::submatrix(std::span<const Index> keep_rows, std::span<const Index> keep_cols) const {
  std::vector<Index> col_map(cols_, -1);
  for (std::size_t j = 0; j < keep_cols.size(); ++j) col_map[keep_cols[j]] = static_cast<Index>(j);
  std::vector<Triplet> trip;
  for (std::size_t i = 0; i < keep_rows.size(); ++i) {
    const Index r = keep_rows[i];
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const Index c = col_map[col_idx_[k]];
      if (c >= 0) trip.push_back({static_cast<Index>(i), c, values_[k]});
    }
  }
  return from_triplets(static_cast<Index>(keep_rows.size()), static_cast<Index>(keep_cols.size()), std::move(trip));
}

SparseMatrix SparseMatrix::with_identity_row(Index r) const {
  require(rows_ == cols_, "pinning requires a square matrix");
  std::vector<Triplet> trip;
  trip.reserve(nnz() + 1);
  for (Index i = 0; i < rows_; ++i) {
    if (i == r) continue;
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) trip.push_back({i, col_idx_[k], values_[k]});
  }
  trip.push_back({r, r, 1.0});
  return from_triplets(rows_, cols_, std::move(trip));
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  const SparseMatrix t = transpose();
  if (t.col_idx_ != col_idx_ || t.row_ptr_ != row_ptr_) return false;
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (std::abs(values_[k] - t.values_[k]) > tol) return false;
  return true;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  require(a.cols_ == b.rows_, "multiply: inner dimensions differ");
  SparseMatrix c(a.rows_, b.cols_);
  std::vector<double> acc(b.cols_, 0.0);
  std::vector<Index> mark(b.cols_, -1);
  std::vector<Index> pattern;
  for (Index r = 0; r < a.rows_; ++r) {
    pattern.clear();
    for (Index ka = a.row_ptr_[r]; ka < a.row_ptr_[r + 1]; ++ka) {
      const Index j = a.col_idx_[ka];
      const double av = a.values_[ka];
      for (Index kb = b.row_ptr_[j]; kb < b.row_ptr_[j + 1]; ++kb) {
        const Index col = b.col_idx_[kb];
        if (mark[col] != r) {
          mark[col] = r;
          acc[col] = 0.0;
          pattern.push_back(col);
        }
        acc[col] += av * b.values_[kb];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (Index col : pattern) {
      if (acc[col] != 0.0) {
        c.col_idx_.push_back(col);
        c.values_.push_back(acc[col]);
      }
    }
    c.row_ptr_[r + 1] = static_cast<Index>(c.values_.size());
  }
  return c;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  require(a.rows_ == b.rows_ && a.cols_ == b.cols_, "add: shapes differ");
  SparseMatrix c(a.rows_, a.cols_);
  for (Index r = 0; r < a.rows_; ++r) {
    Index i = a.row_ptr_[r], j = b.row_ptr_[r];
    const Index ie = a.row_ptr_[r + 1], je = b.row_ptr_[r + 1];
    while (i < ie || j < je) {
      Index col;
      double v;
      if (j >= je || (i < ie && a.col_idx_[i] < b.col_idx_[j])) {
        col = a.col_idx_[i];
        v = alpha * a.values_[i++];
      } else if (i >= ie || b.col_idx_[j] < a.col_idx_[i]) {
        col = b.col_idx_[j];
        v = beta * b.values_[j++];
      } else {
        col = a.col_idx_[i];
        v = alpha * a.values_[i++] + beta * b.values_[j++];
      }
      if (v != 0.0) {
        c.col_idx_.push_back(col);
        c.values_.push_back(v);
      }
    }
    c.row_ptr_[r + 1] = static_cast<Index>(c.values_.size());
  }
  return c;
}

SparseMatrix scaled(const SparseMatrix& a, double alpha) {
  std::vector<double> left(a.rows(), alpha);
  return diagonal_scale(left, a, {});
}

SparseMatrix diagonal_scale(std::span<const double> left, const SparseMatrix& a, std::span<const double> right) {
  require(left.empty() || static_cast<Index>(left.size()) == a.rows_, "diagonal_scale: left size");
  require(right.empty() || static_cast<Index>(right.size()) == a.cols_, "diagonal_scale: right size");
  SparseMatrix c(a.rows_, a.cols_);
  for (Index r = 0; r < a.rows_; ++r) {
    const double lr = left.empty() ? 1.0 : left[r];
    for (Index k = a.row_ptr_[r]; k < a.row_ptr_[r + 1]; ++k) {
      const double v = lr * a.values_[k] * (right.empty() ? 1.0 : right[a.col_idx_[k]]);
      if (v != 0.0) {
        c.col_idx_.push_back(a.col_idx_[k]);
        c.values_.push_back(v);
      }
    }
    c.row_ptr_[r + 1] = static_cast<Index>(c.values_.size());
  }
  return c;
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  require(static_cast<Index>(x.size()) == a.cols(), "spmv: vector length");
  std::vector<double> y(a.rows(), 0.0);
  for (Index r = 0; r < a.rows(); ++r) {
    const auto cols = a.row_cols(r);
    const auto vals = a.row_values(r);
    double s = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) s += vals[k] * x[cols[k]];
    y[r] = s;
  }
  return y;
}

std::vector<double> spmv_transpose(const SparseMatrix& a, std::span<const double> x) {
  require(static_cast<Index>(x.size()) == a.rows(), "spmv_transpose: vector length");
  std::vector<double> y(a.cols(), 0.0);
  for (Index r = 0; r < a.rows(); ++r) {
    const auto cols = a.row_cols(r);
    const auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) y[cols[k]] += vals[k] * x[r];
  }
  return y;
}

void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (Index r = 0; r < a.rows(); ++r) {
    const auto cols = a.row_cols(r);
    const auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) out << fmt::format("{} {} {:.17g}\n", r + 1, cols[k] + 1, vals[k]);
  }
}

void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
  std::ostringstream s;
  write_matrix_market(a, s);
  write_file_atomic(path, s.str());
}

}  // namespace dec
