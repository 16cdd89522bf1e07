#include "ipiano/problems/toy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ipiano/errors.hpp"

namespace ipiano {
namespace {

double slice_value(double t, double a, double mu, double lambda) {
  const double s = t - a;
  return 0.5 * std::log1p(mu * s * s) + lambda * std::abs(t);
}

// Root of q on [lo, hi] given q(lo), q(hi) of opposite sign.
template <class F>
double bisect(F&& q, double lo, double hi) {
  double q_lo = q(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) return mid;
    const double q_mid = q(mid);
    if (q_mid == 0.0) return mid;
    if ((q_mid < 0.0) == (q_lo < 0.0)) {
      lo = mid;
      q_lo = q_mid;
    } else {
      hi = mid;
    }
  }
  throw NumericalError("toy_critical_points_1d: bisection did not converge");
}

}  // namespace

void validate(const ToyProblem& prob) {
  if (prob.u0.empty()) throw ConfigError("ToyProblem: u0 must not be empty");
  if (!(prob.mu > 0.0)) throw ConfigError("ToyProblem: mu must be > 0");
  if (!(prob.lambda > 0.0)) throw ConfigError("ToyProblem: lambda must be > 0");
  if (!all_finite(prob.u0)) throw ConfigError("ToyProblem: u0 must be finite");
}

ValueGrad toy_f_grad(std::span<const double> x, const ToyProblem& prob) {
  if (x.size() != prob.u0.size()) {
    throw ConfigError("toy_f_grad: expected dimension " + std::to_string(prob.u0.size()));
  }
  ValueGrad out{0.0, Vector(x.size())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = x[i] - prob.u0[i];
    const double q = 1.0 + prob.mu * s * s;
    out.value += 0.5 * std::log(q);
    out.grad[i] = prob.mu * s / q;
  }
  return out;
}

Objective toy_objective(const ToyProblem& prob) {
  validate(prob);
  return make_objective(
      [prob](std::span<const double> x) { return toy_f_grad(x, prob); },
      l1_term(prob.lambda));
}

std::vector<CriticalPoint> toy_critical_points_1d(double a, double mu, double lambda) {
  if (!(mu > 0.0) || !(lambda > 0.0)) {
    throw ConfigError("toy_critical_points_1d: mu and lambda must be > 0");
  }
  std::vector<CriticalPoint> points;

  // t = 0 is critical iff |f'(0)| <= lambda.
  const double slope0 = mu * (-a) / (1.0 + mu * a * a);
  if (std::abs(slope0) <= lambda) points.push_back({0.0, std::abs(slope0) < lambda});

  // Away from 0: sigma lambda mu s^2 + mu s + sigma lambda = 0, sigma = sgn(t).
  // The parabola has its vertex at s = -sigma/(2 lambda) and two roots when
  // mu > 4 lambda^2.
  for (const double sigma : {-1.0, 1.0}) {
    const auto q = [&](double s) { return sigma * lambda * mu * s * s + mu * s + sigma * lambda; };
    const double vertex = -sigma / (2.0 * lambda);
    if (q(vertex) * sigma >= 0.0) continue;
    for (const double dir : {-1.0, 1.0}) {
      double reach = 1.0 / lambda + 1.0;
      while (q(vertex + dir * reach) * sigma <= 0.0) reach *= 2.0;
      const double s = bisect(q, vertex, vertex + dir * reach);
      const double t = a + s;
      if (t == 0.0 || (t > 0.0) != (sigma > 0.0)) continue;
      // f''(s) = mu (1 - mu s^2)/(1 + mu s^2)^2 and g is linear on this side.
      points.push_back({t, mu * s * s < 1.0});
    }
  }
  std::sort(points.begin(), points.end(),
            [](const CriticalPoint& l, const CriticalPoint& r) { return l.t < r.t; });
  return points;
}

std::vector<Vector> toy_stationary_points(const ToyProblem& prob) {
  validate(prob);
  std::vector<Vector> result{Vector{}};
  for (const double a : prob.u0) {
    std::vector<double> minima;
    for (const CriticalPoint& p : toy_critical_points_1d(a, prob.mu, prob.lambda)) {
      if (p.local_minimum) minima.push_back(p.t);
    }
    std::vector<Vector> extended;
    extended.reserve(result.size() * minima.size());
    for (const Vector& prefix : result) {
      for (const double t : minima) {
        Vector v = prefix;
        v.push_back(t);
        extended.push_back(std::move(v));
      }
    }
    result = std::move(extended);
  }
  return result;
}

Vector toy_global_minimizer(const ToyProblem& prob) {
  validate(prob);
  Vector x;
  x.reserve(prob.u0.size());
  for (const double a : prob.u0) {
    double best_t = 0.0;
    double best_h = std::numeric_limits<double>::infinity();
    for (const CriticalPoint& p : toy_critical_points_1d(a, prob.mu, prob.lambda)) {
      if (!p.local_minimum) continue;
      const double h = slice_value(p.t, a, prob.mu, prob.lambda);
      if (h < best_h) {
        best_h = h;
        best_t = p.t;
      }
    }
    x.push_back(best_t);
  }
  return x;
}

}  // namespace ipiano
