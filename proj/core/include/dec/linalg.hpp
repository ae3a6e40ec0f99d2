#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dec/sparse.hpp"

namespace dec {

// Sparse LU with threshold partial pivoting.
//
// Columns are preordered by approximate minimum degree on the pattern of
// A + A^T and the factorization is left-looking (Gilbert-Peierls): each column
// is obtained by a sparse triangular solve whose nonzero pattern comes from a
// depth-first reach through L. A candidate on the (permuted) diagonal is kept
// whenever its magnitude is at least pivot_threshold times the largest
// candidate in the column, which preserves the symmetric preordering.
class SparseLU {
 public:
  struct Options {
    double pivot_threshold = 0.01;
    // A pivot below this fraction of the column's largest input magnitude is
    // treated as zero.
    double singular_tolerance = 1e-14;
    bool reorder = true;
  };

  SparseLU() = default;
  explicit SparseLU(const SparseMatrix& a) { factorize(a); }
  SparseLU(const SparseMatrix& a, Options options) : options_(options) { factorize(a); }

  // Throws SingularMatrix when a zero pivot is met.
  void factorize(const SparseMatrix& a);

  Index size() const { return n_; }
  std::size_t fill() const { return lx_.size() + ux_.size(); }

  std::vector<double> solve(std::span<const double> b) const;
  std::vector<double> solve_transpose(std::span<const double> b) const;

 private:
  Options options_{};
  Index n_ = 0;
  std::vector<Index> q_;     // column k of the factor is column q_[k] of A
  std::vector<Index> pinv_;  // row i of A is pivot row pinv_[i]
  std::vector<Index> lp_, li_;
  std::vector<double> lx_;
  std::vector<Index> up_, ui_;
  std::vector<double> ux_;
};

// Square system with an optional pinned unknown for nullspace removal.
struct LinearSystem {
  struct Pin {
    Index index;
    double value;
  };

  SparseMatrix matrix;
  std::vector<double> rhs;
  std::optional<Pin> pinned;
};

// Relative residual required of every solve, measured on the row-equilibrated
// system (see solve()).
inline constexpr double kResidualTolerance = 1e-10;

// Applies the pin (row and column replaced by the identity, column moved to
// the right-hand side) and returns the modified system.
LinearSystem apply_pin(const LinearSystem& system);

// Direct solve with up to three steps of iterative refinement. Rows are first
// scaled to unit max-norm (R A x = R b), and the result satisfies
// ||R(Ax - b)||_2 / ||Rb||_2 <= kResidualTolerance. Without the scaling the
// contract is unreachable in double precision once a Hodge star entry is many
// orders of magnitude above the rest of its matrix (tiny dual edges).
// Throws SingularMatrix or InaccurateSolve.
std::vector<double> solve(const LinearSystem& system);

// ||Ax - b||_2 / ||b||_2
double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b);

// Reciprocal max-norm of every row (1 for empty rows).
std::vector<double> row_equilibration(const SparseMatrix& a);

// ||R(Ax - b)||_2 / ||Rb||_2 with R = diag(row_equilibration(A)).
double equilibrated_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b);

enum class CondMode { DenseSvd, Estimate };

inline constexpr Index kDenseSvdMaxRows = 3000;

// 2-norm condition number. DenseSvd takes sigma_max / sigma_min of the dense
// matrix (rows <= kDenseSvdMaxRows); Estimate uses power iteration on A^T A
// and inverse iteration through the LU factors.
double condition_number(const SparseMatrix& a, CondMode mode);

}  // namespace dec
