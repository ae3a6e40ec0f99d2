#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dec/mesh.hpp"

namespace dec {

struct Triplet {
  Index row;
  Index col;
  double value;
};

// General sparse matrix in compressed-row layout. Column indices are strictly
// increasing within a row and no explicit zeros are stored.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols);

  // Duplicates are summed; entries that sum to exactly zero are dropped.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(Index n);
  static SparseMatrix diagonal(std::span<const double> diag);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<Index>& row_offsets() const { return row_ptr_; }
  const std::vector<Index>& col_indices() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const Index> row_cols(Index r) const;
  std::span<const double> row_values(Index r) const;

  // Zero when the entry is not stored.
  double coeff(Index r, Index c) const;

  SparseMatrix transpose() const;

  Eigen::MatrixXd to_dense() const;
  static SparseMatrix from_dense(const Eigen::MatrixXd& dense);

  // Rows and columns kept, in the given order.
  SparseMatrix submatrix(std::span<const Index> keep_rows, std::span<const Index> keep_cols) const;

  // Replaces row r by the unit row e_r.
  SparseMatrix with_identity_row(Index r) const;

  double max_abs() const;
  bool is_symmetric(double tol = 0.0) const;

 private:
  friend SparseMatrix multiply(const SparseMatrix&, const SparseMatrix&);
  friend SparseMatrix add(const SparseMatrix&, const SparseMatrix&, double, double);
  friend SparseMatrix diagonal_scale(std::span<const double>, const SparseMatrix&, std::span<const double>);

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

// A * B (Gustavson row-by-row product).
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
inline SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) { return multiply(a, b); }

// alpha * A + beta * B
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);
inline SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) { return add(a, b); }
inline SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) { return add(a, b, 1.0, -1.0); }

SparseMatrix scaled(const SparseMatrix& a, double alpha);

// diag(left) * A * diag(right); an empty span means identity on that side.
SparseMatrix diagonal_scale(std::span<const double> left, const SparseMatrix& a, std::span<const double> right);

// y = A x
std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);
// y = A^T x
std::vector<double> spmv_transpose(const SparseMatrix& a, std::span<const double> x);

// Matrix Market coordinate/real/general.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);
void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path);

}  // namespace dec
