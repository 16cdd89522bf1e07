#include "ipiano/objective.hpp"

#include "ipiano/errors.hpp"

namespace ipiano {

ValueGrad Objective::smooth_eval(std::span<const double> x) const {
  if (smooth_value_grad) return smooth_value_grad(x);
  return {smooth_value(x), smooth_grad(x)};
}

Objective make_objective(std::function<double(std::span<const double>)> f,
                         std::function<Vector(std::span<const double>)> grad_f,
                         ConvexTerm g, double lower_bound) {
  if (!f || !grad_f || !g.value || !g.prox) {
    throw ConfigError("make_objective: every callable must be set");
  }
  Objective obj;
  obj.smooth_value = std::move(f);
  obj.smooth_grad = std::move(grad_f);
  obj.convex_value = std::move(g.value);
  obj.prox = std::move(g.prox);
  obj.lower_bound = lower_bound;
  return obj;
}

Objective make_objective(std::function<ValueGrad(std::span<const double>)> f_and_grad,
                         ConvexTerm g, double lower_bound) {
  if (!f_and_grad || !g.value || !g.prox) {
    throw ConfigError("make_objective: every callable must be set");
  }
  Objective obj;
  obj.smooth_value = [f_and_grad](std::span<const double> x) {
    return f_and_grad(x).value;
  };
  obj.smooth_grad = [f_and_grad](std::span<const double> x) {
    return f_and_grad(x).grad;
  };
  obj.smooth_value_grad = std::move(f_and_grad);
  obj.convex_value = std::move(g.value);
  obj.prox = std::move(g.prox);
  obj.lower_bound = lower_bound;
  return obj;
}

}  // namespace ipiano
