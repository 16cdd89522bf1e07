#include "ipiano/prox.hpp"

#include <cmath>
#include <memory>

#include "ipiano/errors.hpp"

namespace ipiano {
namespace {

inline double shrink(double y, double tau) {
  const double magnitude = std::abs(y) - tau;
  if (magnitude <= 0.0) return 0.0;
  return y > 0.0 ? magnitude : -magnitude;
}

void require_same_size(std::span<const double> a, std::span<const double> b,
                       const char* what) {
  if (a.size() != b.size()) {
    throw ConfigError(std::string(what) + ": shape mismatch (" +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
}

}  // namespace

Vector prox_l1(std::span<const double> y, double tau) {
  if (!(tau >= 0.0)) throw ConfigError("prox_l1: tau must be >= 0");
  Vector out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = shrink(y[i], tau);
  return out;
}

Vector prox_weighted_quadratic(std::span<const double> y_hat,
                               std::span<const double> u0,
                               double alpha_lambda) {
  require_same_size(y_hat, u0, "prox_weighted_quadratic");
  if (!(alpha_lambda >= 0.0)) {
    throw ConfigError("prox_weighted_quadratic: alpha*lambda must be >= 0");
  }
  const double denom = 1.0 + alpha_lambda;
  Vector out(y_hat.size());
  for (std::size_t i = 0; i < y_hat.size(); ++i) {
    out[i] = (y_hat[i] + alpha_lambda * u0[i]) / denom;
  }
  return out;
}

Vector prox_shifted_l1(std::span<const double> y_hat,
                       std::span<const double> u0, double tau) {
  require_same_size(y_hat, u0, "prox_shifted_l1");
  if (!(tau >= 0.0)) throw ConfigError("prox_shifted_l1: tau must be >= 0");
  Vector out(y_hat.size());
  for (std::size_t i = 0; i < y_hat.size(); ++i) {
    out[i] = shrink(y_hat[i] - u0[i], tau) + u0[i];
  }
  return out;
}

Vector prox_zero(std::span<const double> y, double /*alpha*/) {
  return Vector(y.begin(), y.end());
}

ConvexTerm zero_term() {
  return {[](std::span<const double>) { return 0.0; }, &prox_zero, "zero"};
}

ConvexTerm l1_term(double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("l1_term: lambda must be >= 0");
  return {
      [lambda](std::span<const double> x) {
        double sum = 0.0;
        for (double v : x) sum += std::abs(v);
        return lambda * sum;
      },
      [lambda](std::span<const double> y, double alpha) {
        return prox_l1(y, alpha * lambda);
      },
      "l1(lambda=" + std::to_string(lambda) + ")"};
}

ConvexTerm quadratic_data_term(Vector u0, double lambda) {
  if (!(lambda >= 0.0)) {
    throw ConfigError("quadratic_data_term: lambda must be >= 0");
  }
  auto target = std::make_shared<const Vector>(std::move(u0));
  return {
      [target, lambda](std::span<const double> x) {
        require_same_size(x, *target, "quadratic_data_term");
        return 0.5 * lambda * squared_norm(subtract(x, *target));
      },
      [target, lambda](std::span<const double> y, double alpha) {
        return prox_weighted_quadratic(y, *target, alpha * lambda);
      },
      "quadratic_data(lambda=" + std::to_string(lambda) + ")"};
}

ConvexTerm l1_data_term(Vector u0, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("l1_data_term: lambda must be >= 0");
  auto target = std::make_shared<const Vector>(std::move(u0));
  return {
      [target, lambda](std::span<const double> x) {
        require_same_size(x, *target, "l1_data_term");
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          sum += std::abs(x[i] - (*target)[i]);
        }
        return lambda * sum;
      },
      [target, lambda](std::span<const double> y, double alpha) {
        return prox_shifted_l1(y, *target, alpha * lambda);
      },
      "l1_data(lambda=" + std::to_string(lambda) + ")"};
}

}  // namespace ipiano
