#pragma once

#include <functional>
#include <span>

#include "ipiano/prox.hpp"
#include "ipiano/vector_ops.hpp"

namespace ipiano {

struct ValueGrad {
  double value = 0.0;
  Vector grad;
};

// Composite objective h = f + g with smooth f (Lipschitz gradient, possibly
// non-convex) and convex g given through its proximal map.
//
// All callables must be safe to invoke concurrently: independent solver runs
// may share one Objective.
struct Objective {
  std::function<double(std::span<const double>)> smooth_value;
  std::function<Vector(std::span<const double>)> smooth_grad;
  // Optional fused evaluation of f and grad f. Problems whose value and
  // gradient share work (convolutions, linear solves) provide it.
  std::function<ValueGrad(std::span<const double>)> smooth_value_grad;

  std::function<double(std::span<const double>)> convex_value;
  std::function<Vector(std::span<const double>, double)> prox;

  // A lower bound on h; every shipped objective is a sum of nonnegative terms.
  double lower_bound = 0.0;

  ValueGrad smooth_eval(std::span<const double> x) const;
  double value(std::span<const double> x) const {
    return smooth_value(x) + convex_value(x);
  }
};

Objective make_objective(std::function<double(std::span<const double>)> f,
                         std::function<Vector(std::span<const double>)> grad_f,
                         ConvexTerm g, double lower_bound = 0.0);

Objective make_objective(std::function<ValueGrad(std::span<const double>)> f_and_grad,
                         ConvexTerm g, double lower_bound = 0.0);

}  // namespace ipiano
