#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ipiano/image.hpp"
#include "ipiano/objective.hpp"

namespace ipiano {

// Odd-sized 2-D filter, row-major taps, centered. Separable kernels keep their
// column and row factors (taps = column * row^T) and are applied in two 1-D
// passes.
struct Kernel {
  std::size_t height = 0;
  std::size_t width = 0;
  Vector taps;
  std::optional<Vector> column_factor;
  std::optional<Vector> row_factor;

  double operator()(std::size_t r, std::size_t c) const { return taps[r * width + c]; }

  static Kernel dense(std::size_t height, std::size_t width, Vector taps);
  static Kernel separable(Vector column, Vector row);
  static Kernel impulse();
};

// Convolution K u = k * u with symmetric (half-sample mirror) padding.
// Throws ConfigError when the kernel is larger than the image.
Vector apply_filter(const Kernel& k, ImageShape shape, std::span<const double> u);
// K^T v.
Vector apply_filter_adjoint(const Kernel& k, ImageShape shape, std::span<const double> v);

// Power-iteration estimate of the operator norm |K| on images of this shape.
// Separable kernels use |K| = |K_col| |K_row|.
double filter_norm_estimate(const Kernel& k, ImageShape shape, int iterations = 100,
                            std::uint64_t seed = 7);

// The size*size - 1 non-constant members of the orthonormal 2-D DCT-II basis.
std::vector<Kernel> dct_filter_bank(std::size_t size = 7);

enum class MrfData { kL2, kL1 };

// h(u) = sum_i theta_i sum_p phi((K_i u)_p) + data term,  phi(t) = log(1 + t^2),
// with data term lambda/2 |u - u0|^2 (kL2) or lambda |u - u0|_1 (kL1).
struct MRFModel {
  std::vector<Kernel> filters;
  Vector weights;
  ImageShape shape;
  MrfData data = MrfData::kL2;
  Vector u0;
  double lambda = 0.05;
};

void validate(const MRFModel& model);

ValueGrad mrf_f_grad(std::span<const double> u, const MRFModel& model);

// 2 sum_i theta_i |K_i|^2, with 2 = max |phi''|.
double mrf_lipschitz_bound(const MRFModel& model);

Objective mrf_objective(const MRFModel& model);

// DCT filter bank with equal weights scaled so mrf_lipschitz_bound equals
// target_lipschitz.
MRFModel make_dct_mrf_model(const Image& noisy, MrfData data, double lambda,
                            std::size_t filter_size = 7, double target_lipschitz = 100.0);

// Noisy image for kL2, zero image for kL1.
Vector mrf_initial_point(const MRFModel& model);

}  // namespace ipiano
