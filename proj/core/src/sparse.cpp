#include "ipiano/sparse.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <iomanip>
#include <ostream>

#include "ipiano/errors.hpp"

namespace ipiano {
namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using EigenVector = Eigen::VectorXd;

EigenSparse to_eigen(const SparseMatrix& a) {
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(a.nonzeros());
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(a.col_indices[k]),
                            a.values[k]);
    }
  }
  EigenSparse out(static_cast<int>(a.rows), static_cast<int>(a.cols));
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

Eigen::Map<const EigenVector> view(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[i]);
  const auto end = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[i + 1]);
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - col_indices.begin())];
}

Vector SparseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols) throw ConfigError("SparseMatrix::multiply: dimension mismatch");
  Vector y(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      sum += values[k] * x[col_indices[k]];
    }
    y[i] = sum;
  }
  return y;
}

Vector SparseMatrix::multiply_transpose(std::span<const double> x) const {
  if (x.size() != rows) {
    throw ConfigError("SparseMatrix::multiply_transpose: dimension mismatch");
  }
  Vector y(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      y[col_indices[k]] += values[k] * x[i];
    }
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.row_offsets.assign(cols + 1, 0);
  for (std::size_t j : col_indices) ++t.row_offsets[j + 1];
  for (std::size_t j = 0; j < cols; ++j) t.row_offsets[j + 1] += t.row_offsets[j];
  t.col_indices.resize(nonzeros());
  t.values.resize(nonzeros());
  std::vector<std::size_t> cursor(t.row_offsets.begin(), t.row_offsets.end() - 1);
  // Rows are visited in increasing order, so each transposed row stays sorted.
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      const std::size_t dst = cursor[col_indices[k]]++;
      t.col_indices[dst] = i;
      t.values[dst] = values[k];
    }
  }
  return t;
}

SparseMatrix assemble_laplacian(std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) {
    throw ConfigError("assemble_laplacian: grid dimensions must be >= 1");
  }
  const std::size_t n = height * width;
  SparseMatrix lap;
  lap.rows = lap.cols = n;
  lap.row_offsets.reserve(n + 1);
  lap.col_indices.reserve(5 * n);
  lap.values.reserve(5 * n);
  lap.row_offsets.push_back(0);

  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t p = y * width + x;
      const bool up = y > 0;
      const bool down = y + 1 < height;
      const bool left = x > 0;
      const bool right = x + 1 < width;
      const double degree = static_cast<double>(up + down + left + right);
      // Column order: up, left, center, right, down.
      if (up) {
        lap.col_indices.push_back(p - width);
        lap.values.push_back(1.0);
      }
      if (left) {
        lap.col_indices.push_back(p - 1);
        lap.values.push_back(1.0);
      }
      if (degree > 0.0) {
        lap.col_indices.push_back(p);
        lap.values.push_back(-degree);
      }
      if (right) {
        lap.col_indices.push_back(p + 1);
        lap.values.push_back(1.0);
      }
      if (down) {
        lap.col_indices.push_back(p + width);
        lap.values.push_back(1.0);
      }
      lap.row_offsets.push_back(lap.col_indices.size());
    }
  }
  return lap;
}

SparseMatrix assemble_system(std::span<const double> c, const SparseMatrix& laplacian) {
  if (laplacian.rows != laplacian.cols || c.size() != laplacian.rows) {
    throw ConfigError("assemble_system: mask size does not match the Laplacian");
  }
  const std::size_t n = laplacian.rows;
  SparseMatrix a;
  a.rows = a.cols = n;
  a.row_offsets.reserve(n + 1);
  a.col_indices.reserve(laplacian.nonzeros() + n);
  a.values.reserve(laplacian.nonzeros() + n);
  a.row_offsets.push_back(0);

  for (std::size_t i = 0; i < n; ++i) {
    const double scale = c[i] - 1.0;
    bool diagonal_done = false;
    auto push = [&](std::size_t j, double v) {
      if (v != 0.0) {
        a.col_indices.push_back(j);
        a.values.push_back(v);
      }
    };
    for (std::size_t k = laplacian.row_offsets[i]; k < laplacian.row_offsets[i + 1]; ++k) {
      const std::size_t j = laplacian.col_indices[k];
      if (!diagonal_done && j >= i) {
        if (j == i) {
          push(i, c[i] + scale * laplacian.values[k]);
          diagonal_done = true;
          continue;
        }
        push(i, c[i]);
        diagonal_done = true;
      }
      push(j, scale * laplacian.values[k]);
    }
    if (!diagonal_done) push(i, c[i]);
    a.row_offsets.push_back(a.col_indices.size());
  }
  return a;
}

struct LuFactorization::Impl {
  EigenSparse matrix;
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
};

LuFactorization::LuFactorization(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows != a.cols) throw ConfigError("LuFactorization: matrix must be square");
  impl_->matrix = to_eigen(a);
  impl_->lu.analyzePattern(impl_->matrix);
  impl_->lu.factorize(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success) {
    throw SingularSystemError("sparse LU factorization failed: " +
                              impl_->lu.lastErrorMessage());
  }
}

LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

namespace {

template <class Solve, class Apply>
Vector refine(std::span<const double> b, double tol, Solve&& solve_with, Apply&& apply) {
  if (!(tol > 0.0)) throw ConfigError("sparse solve: tol must be > 0");
  const EigenVector rhs = view(b);
  const double target = tol * std::max(rhs.norm(), std::numeric_limits<double>::min());
  EigenVector x = solve_with(rhs);
  for (int round = 0;; ++round) {
    if (!x.allFinite()) throw SingularSystemError("sparse solve produced non-finite values");
    const EigenVector residual = rhs - apply(x);
    if (residual.norm() <= target) break;
    if (round == 3) {
      throw SingularSystemError("sparse solve missed its residual bound (|r|=" +
                                std::to_string(residual.norm()) +
                                ", bound=" + std::to_string(target) + ")");
    }
    x += solve_with(residual);
  }
  return Vector(x.data(), x.data() + x.size());
}

}  // namespace

Vector LuFactorization::solve(std::span<const double> b, double tol) const {
  if (b.size() != static_cast<std::size_t>(impl_->matrix.rows())) {
    throw ConfigError("LuFactorization::solve: dimension mismatch");
  }
  return refine(
      b, tol, [&](const EigenVector& r) -> EigenVector { return impl_->lu.solve(r); },
      [&](const EigenVector& x) -> EigenVector { return impl_->matrix * x; });
}

Vector LuFactorization::solve_transpose(std::span<const double> b, double tol) const {
  if (b.size() != static_cast<std::size_t>(impl_->matrix.rows())) {
    throw ConfigError("LuFactorization::solve_transpose: dimension mismatch");
  }
  return refine(
      b, tol,
      [&](const EigenVector& r) -> EigenVector { return impl_->lu.transpose().solve(r); },
      [&](const EigenVector& x) -> EigenVector { return impl_->matrix.transpose() * x; });
}

Vector solve(const SparseMatrix& a, std::span<const double> b, double tol) {
  return LuFactorization(a).solve(b, tol);
}

Vector solve_transpose(const SparseMatrix& a, std::span<const double> b, double tol) {
  return LuFactorization(a).solve_transpose(b, tol);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows << ' ' << a.cols << ' ' << a.nonzeros() << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      out << i + 1 << ' ' << a.col_indices[k] + 1 << ' ' << a.values[k] << '\n';
    }
  }
}

}  // namespace ipiano
