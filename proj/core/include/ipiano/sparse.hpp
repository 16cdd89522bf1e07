#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "ipiano/vector_ops.hpp"

namespace ipiano {

// Compressed-row sparse matrix. Column indices are strictly increasing within
// a row and no explicit zeros are stored.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_offsets;  // rows + 1 entries
  std::vector<std::size_t> col_indices;
  Vector values;

  std::size_t nonzeros() const { return values.size(); }
  // Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  Vector multiply(std::span<const double> x) const;
  Vector multiply_transpose(std::span<const double> x) const;
  SparseMatrix transpose() const;
};

// 5-point Laplacian on a height x width grid (row-major pixels) with
// homogeneous Neumann boundary: L = -D^T D for forward differences D with
// zero flux across the border. Symmetric, negative semidefinite, rows sum to 0.
SparseMatrix assemble_laplacian(std::size_t height, std::size_t width);

// A = C + (C - I) L with C = diag(c).
SparseMatrix assemble_system(std::span<const double> c, const SparseMatrix& laplacian);

inline constexpr double kDefaultSolveTolerance = 1e-10;

// Sparse LU factorization of a square matrix. Solves are checked against the
// residual contract |A x - b| <= tol * max(|b|, eps) (with a few rounds of
// iterative refinement) and throw SingularSystemError when it cannot be met.
class LuFactorization {
 public:
  explicit LuFactorization(const SparseMatrix& a);
  ~LuFactorization();
  LuFactorization(LuFactorization&&) noexcept;
  LuFactorization& operator=(LuFactorization&&) noexcept;

  Vector solve(std::span<const double> b, double tol = kDefaultSolveTolerance) const;
  Vector solve_transpose(std::span<const double> b,
                         double tol = kDefaultSolveTolerance) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Vector solve(const SparseMatrix& a, std::span<const double> b,
             double tol = kDefaultSolveTolerance);
Vector solve_transpose(const SparseMatrix& a, std::span<const double> b,
                       double tol = kDefaultSolveTolerance);

// Matrix Market coordinate format ("%%MatrixMarket matrix coordinate real general").
void write_matrix_market(std::ostream& out, const SparseMatrix& a);

}  // namespace ipiano
