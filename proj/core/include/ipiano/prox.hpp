#pragma once

#include <functional>
#include <span>
#include <string>

#include "ipiano/vector_ops.hpp"

namespace ipiano {

// A proper, closed, convex function g together with its proximal map
//   prox(y, alpha) = argmin_x  0.5 * |x - y|^2 + alpha * g(x).
// value may return +infinity outside dom g.
struct ConvexTerm {
  std::function<double(std::span<const double>)> value;
  std::function<Vector(std::span<const double>, double)> prox;
  std::string description;
};

// Soft shrinkage max(0, |y| - tau) * sgn(y), componentwise. sgn(0) = 0.
Vector prox_l1(std::span<const double> y, double tau);

// (y_hat + alpha_lambda * u0) / (1 + alpha_lambda), componentwise.
Vector prox_weighted_quadratic(std::span<const double> y_hat,
                               std::span<const double> u0,
                               double alpha_lambda);

// u0 + prox_l1(y_hat - u0, tau).
Vector prox_shifted_l1(std::span<const double> y_hat,
                       std::span<const double> u0, double tau);

// Identity: the prox of g == 0.
Vector prox_zero(std::span<const double> y, double alpha);

// Term builders used by the shipped problems.
ConvexTerm zero_term();
// lambda * |x|_1
ConvexTerm l1_term(double lambda);
// lambda/2 * |x - u0|^2
ConvexTerm quadratic_data_term(Vector u0, double lambda);
// lambda * |x - u0|_1
ConvexTerm l1_data_term(Vector u0, double lambda);

}  // namespace ipiano
