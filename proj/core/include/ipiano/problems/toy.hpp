#pragma once

#include <span>
#include <vector>

#include "ipiano/objective.hpp"

namespace ipiano {

// f(x) = 1/2 sum_i log(1 + mu (x_i - u0_i)^2),  g(x) = lambda |x|_1.
// grad f is Lipschitz with constant mu.
struct ToyProblem {
  Vector u0 = {1.0, 1.0};
  double mu = 100.0;
  double lambda = 1.0;

  double lipschitz() const { return mu; }
};

void validate(const ToyProblem& prob);

ValueGrad toy_f_grad(std::span<const double> x, const ToyProblem& prob);
Objective toy_objective(const ToyProblem& prob);

// Critical point of the one-dimensional slice
//   t -> 1/2 log(1 + mu (t - a)^2) + lambda |t|.
struct CriticalPoint {
  double t = 0.0;
  bool local_minimum = false;
};

// All critical points of one coordinate, sorted by t. Nonzero ones come from
// bisection on mu s + sgn(t) lambda (1 + mu s^2) = 0 with s = t - a.
std::vector<CriticalPoint> toy_critical_points_1d(double a, double mu, double lambda);

// The local minimizers of h: the Cartesian product of the per-coordinate
// local minima ({0, x*}^2 for the default problem).
std::vector<Vector> toy_stationary_points(const ToyProblem& prob);

// The local minimizer with the smallest h.
Vector toy_global_minimizer(const ToyProblem& prob);

}  // namespace ipiano
