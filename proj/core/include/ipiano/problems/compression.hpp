#pragma once

#include <span>

#include "ipiano/image.hpp"
#include "ipiano/objective.hpp"
#include "ipiano/sparse.hpp"

namespace ipiano {

// Mask optimization for homogeneous-diffusion inpainting:
//   min_c 1/2 |A(c)^{-1} C u0 - u0|^2 + lambda |c|_1,   A(c) = C + (C - I) L,
// with C = diag(c) and L the Neumann Laplacian of the image grid.
struct CompressionModel {
  ImageShape shape;
  Vector u0;
  double lambda = 0.0;
  SparseMatrix laplacian;
  double solver_tol = kDefaultSolveTolerance;
};

CompressionModel make_compression_model(const Image& image, double lambda,
                                        double solver_tol = kDefaultSolveTolerance);

// u = A(c)^{-1} C u0. Throws DegenerateMaskError when c is (numerically) zero or
// A(c) cannot be solved to solver_tol.
Vector compression_reconstruct(std::span<const double> c, const CompressionModel& model);

// Value 1/2 |u - u0|^2 and gradient t .* z with t = -(I + L) u + u0 and
// A^T z = u - u0. One factorization serves both solves.
ValueGrad compression_f_grad(std::span<const double> c, const CompressionModel& model);

Objective compression_objective(const CompressionModel& model);

// c = all-ones: every pixel stored, u = u0.
Vector compression_initial_mask(const CompressionModel& model);

}  // namespace ipiano
