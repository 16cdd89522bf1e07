#include "ipiano/problems/compression.hpp"

#include <string>

#include "ipiano/errors.hpp"

namespace ipiano {
namespace {

void check_mask(std::span<const double> c, const CompressionModel& model) {
  if (c.size() != model.shape.size()) throw ConfigError("mask does not match the image shape");
  if (!all_finite(c)) throw DegenerateMaskError("mask has non-finite entries");
  if (norm_inf(c) <= 1e-12) throw DegenerateMaskError("mask is zero; A(c) = -L is singular");
}

struct Reconstruction {
  LuFactorization lu;
  Vector u;
};

Reconstruction reconstruct(std::span<const double> c, const CompressionModel& model) {
  check_mask(c, model);
  Vector rhs(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) rhs[i] = c[i] * model.u0[i];
  try {
    LuFactorization lu(assemble_system(c, model.laplacian));
    Vector u = lu.solve(rhs, model.solver_tol);
    return {std::move(lu), std::move(u)};
  } catch (const SingularSystemError& e) {
    throw DegenerateMaskError(std::string("inpainting system is singular: ") + e.what());
  }
}

}  // namespace

CompressionModel make_compression_model(const Image& image, double lambda,
                                        double solver_tol) {
  if (image.shape.size() == 0) throw ConfigError("compression: empty image");
  if (!(lambda >= 0.0)) throw ConfigError("compression: lambda must be >= 0");
  if (!(solver_tol > 0.0)) throw ConfigError("compression: solver_tol must be > 0");
  CompressionModel model;
  model.shape = image.shape;
  model.u0 = image.pixels;
  model.lambda = lambda;
  model.laplacian = assemble_laplacian(image.shape.height, image.shape.width);
  model.solver_tol = solver_tol;
  return model;
}

Vector compression_reconstruct(std::span<const double> c, const CompressionModel& model) {
  return reconstruct(c, model).u;
}

ValueGrad compression_f_grad(std::span<const double> c, const CompressionModel& model) {
  Reconstruction rec = reconstruct(c, model);
  const Vector diff = subtract(rec.u, model.u0);
  Vector z;
  try {
    z = rec.lu.solve_transpose(diff, model.solver_tol);
  } catch (const SingularSystemError& e) {
    throw DegenerateMaskError(std::string("inpainting system is singular: ") + e.what());
  }
  const Vector lu_u = model.laplacian.multiply(rec.u);
  ValueGrad out{0.5 * squared_norm(diff), Vector(c.size())};
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double t = -(rec.u[i] + lu_u[i]) + model.u0[i];
    out.grad[i] = t * z[i];
  }
  return out;
}

Objective compression_objective(const CompressionModel& model) {
  if (model.u0.size() != model.shape.size() || model.laplacian.rows != model.shape.size()) {
    throw ConfigError("CompressionModel: inconsistent sizes");
  }
  return make_objective(
      [model](std::span<const double> c) { return compression_f_grad(c, model); },
      l1_term(model.lambda));
}

Vector compression_initial_mask(const CompressionModel& model) {
  return Vector(model.shape.size(), 1.0);
}

}  // namespace ipiano
