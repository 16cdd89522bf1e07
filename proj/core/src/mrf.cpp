#include "ipiano/problems/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ipiano/errors.hpp"

namespace ipiano {
namespace {

// Half-sample symmetric extension: ... u1 u0 | u0 u1 ... u_{n-1} | u_{n-1} ...
std::size_t mirror(std::ptrdiff_t i, std::size_t n) {
  const auto len = static_cast<std::ptrdiff_t>(n);
  if (i < 0) i = -i - 1;
  if (i >= len) i = 2 * len - i - 1;
  return static_cast<std::size_t>(i);
}

// Source index for output i and tap j of a centered filter of length m.
std::vector<std::size_t> tap_sources(std::size_t n, std::size_t m) {
  const auto r = static_cast<std::ptrdiff_t>(m / 2);
  std::vector<std::size_t> src(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      src[i * m + j] =
          mirror(static_cast<std::ptrdiff_t>(i) + r - static_cast<std::ptrdiff_t>(j), n);
    }
  }
  return src;
}

void check_fits(const Kernel& k, ImageShape shape) {
  if (k.height > shape.height || k.width > shape.width) {
    throw ConfigError("filter of size " + std::to_string(k.height) + "x" +
                      std::to_string(k.width) + " is larger than the " +
                      std::to_string(shape.height) + "x" + std::to_string(shape.width) +
                      " image");
  }
}

void check_image(ImageShape shape, std::span<const double> u) {
  if (u.size() != shape.size()) throw ConfigError("image vector does not match its shape");
}

// One 1-D filtering pass along rows (axis 1) or columns (axis 0), added onto
// out.
void pass_into(std::span<const double> in, ImageShape shape, std::span<const double> taps,
               int axis, bool adjoint, std::span<double> out) {
  const std::size_t m = taps.size();
  const std::size_t w = shape.width;
  if (axis == 0) {
    // Whole rows at a time: out_row(y) += k_j in_row(src(y, j)), or the scatter.
    const std::vector<std::size_t> src = tap_sources(shape.height, m);
    for (std::size_t y = 0; y < shape.height; ++y) {
      for (std::size_t j = 0; j < m; ++j) {
        const double k = taps[j];
        const std::size_t s = src[y * m + j];
        const double* from = in.data() + (adjoint ? y : s) * w;
        double* to = out.data() + (adjoint ? s : y) * w;
        for (std::size_t x = 0; x < w; ++x) to[x] += k * from[x];
      }
    }
    return;
  }
  const std::vector<std::size_t> src = tap_sources(w, m);
  const std::size_t r = m / 2;
  for (std::size_t y = 0; y < shape.height; ++y) {
    const double* row = in.data() + y * w;
    double* dst = out.data() + y * w;
    for (std::size_t x = 0; x < w; ++x) {
      const bool interior = x >= r && x + r < w;
      if (!adjoint) {
        double sum = 0.0;
        if (interior) {
          const double* base = row + x + r;
          for (std::size_t j = 0; j < m; ++j) sum += taps[j] * base[-static_cast<std::ptrdiff_t>(j)];
        } else {
          for (std::size_t j = 0; j < m; ++j) sum += taps[j] * row[src[x * m + j]];
        }
        dst[x] += sum;
      } else {
        const double v = row[x];
        if (interior) {
          double* base = dst + x + r;
          for (std::size_t j = 0; j < m; ++j) base[-static_cast<std::ptrdiff_t>(j)] += taps[j] * v;
        } else {
          for (std::size_t j = 0; j < m; ++j) dst[src[x * m + j]] += taps[j] * v;
        }
      }
    }
  }
}

Vector pass(std::span<const double> in, ImageShape shape, std::span<const double> taps,
            int axis, bool adjoint) {
  Vector out(in.size(), 0.0);
  pass_into(in, shape, taps, axis, adjoint, out);
  return out;
}

Vector dense_filter(const Kernel& k, ImageShape shape, std::span<const double> in,
                    bool adjoint) {
  const std::vector<std::size_t> src_y = tap_sources(shape.height, k.height);
  const std::vector<std::size_t> src_x = tap_sources(shape.width, k.width);
  Vector out(in.size(), 0.0);
  for (std::size_t y = 0; y < shape.height; ++y) {
    for (std::size_t x = 0; x < shape.width; ++x) {
      const std::size_t p = y * shape.width + x;
      double sum = 0.0;
      for (std::size_t a = 0; a < k.height; ++a) {
        const std::size_t row = src_y[y * k.height + a] * shape.width;
        for (std::size_t b = 0; b < k.width; ++b) {
          const std::size_t q = row + src_x[x * k.width + b];
          if (adjoint) {
            out[q] += k(a, b) * in[p];
          } else {
            sum += k(a, b) * in[q];
          }
        }
      }
      if (!adjoint) out[p] = sum;
    }
  }
  return out;
}

template <class Op>
double power_norm(std::size_t n, Op&& normal_op, int iterations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Vector v(n);
  for (double& e : v) e = dist(rng);
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double len = norm2(v);
    if (len == 0.0) return 0.0;
    for (double& e : v) e /= len;
    Vector w = normal_op(v);
    estimate = dot(v, w);
    v = std::move(w);
  }
  return std::sqrt(std::max(estimate, 0.0));
}

double phi(double t) { return std::log1p(t * t); }
double phi_prime(double t) { return 2.0 * t / (1.0 + t * t); }

}  // namespace

Kernel Kernel::dense(std::size_t height, std::size_t width, Vector taps) {
  if (height % 2 == 0 || width % 2 == 0) throw ConfigError("Kernel: sizes must be odd");
  if (taps.size() != height * width) throw ConfigError("Kernel: tap count mismatch");
  Kernel k;
  k.height = height;
  k.width = width;
  k.taps = std::move(taps);
  return k;
}

Kernel Kernel::separable(Vector column, Vector row) {
  Vector taps(column.size() * row.size());
  for (std::size_t a = 0; a < column.size(); ++a) {
    for (std::size_t b = 0; b < row.size(); ++b) taps[a * row.size() + b] = column[a] * row[b];
  }
  Kernel k = dense(column.size(), row.size(), std::move(taps));
  k.column_factor = std::move(column);
  k.row_factor = std::move(row);
  return k;
}

Kernel Kernel::impulse() { return separable({1.0}, {1.0}); }

Vector apply_filter(const Kernel& k, ImageShape shape, std::span<const double> u) {
  check_fits(k, shape);
  check_image(shape, u);
  if (k.column_factor && k.row_factor) {
    const Vector rows = pass(u, shape, *k.row_factor, 1, false);
    return pass(rows, shape, *k.column_factor, 0, false);
  }
  return dense_filter(k, shape, u, false);
}

Vector apply_filter_adjoint(const Kernel& k, ImageShape shape, std::span<const double> v) {
  check_fits(k, shape);
  check_image(shape, v);
  if (k.column_factor && k.row_factor) {
    const Vector cols = pass(v, shape, *k.column_factor, 0, true);
    return pass(cols, shape, *k.row_factor, 1, true);
  }
  return dense_filter(k, shape, v, true);
}

double filter_norm_estimate(const Kernel& k, ImageShape shape, int iterations,
                            std::uint64_t seed) {
  check_fits(k, shape);
  if (k.column_factor && k.row_factor) {
    const auto axis_norm = [&](const Vector& taps, std::size_t n, int axis) {
      const ImageShape line = axis == 0 ? ImageShape{n, 1} : ImageShape{1, n};
      return power_norm(
          n,
          [&](const Vector& v) {
            return pass(pass(v, line, taps, axis, false), line, taps, axis, true);
          },
          iterations, seed);
    };
    return axis_norm(*k.column_factor, shape.height, 0) *
           axis_norm(*k.row_factor, shape.width, 1);
  }
  return power_norm(
      shape.size(),
      [&](const Vector& v) {
        return apply_filter_adjoint(k, shape, apply_filter(k, shape, v));
      },
      iterations, seed);
}

std::vector<Kernel> dct_filter_bank(std::size_t size) {
  if (size == 0 || size % 2 == 0) throw ConfigError("dct_filter_bank: size must be odd");
  const double n = static_cast<double>(size);
  std::vector<Vector> basis(size, Vector(size));
  for (std::size_t f = 0; f < size; ++f) {
    const double scale = std::sqrt((f == 0 ? 1.0 : 2.0) / n);
    for (std::size_t j = 0; j < size; ++j) {
      basis[f][j] = scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(j) + 1.0) *
                                     static_cast<double>(f) / (2.0 * n));
    }
  }
  std::vector<Kernel> bank;
  bank.reserve(size * size - 1);
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = 0; b < size; ++b) {
      if (a == 0 && b == 0) continue;
      bank.push_back(Kernel::separable(basis[a], basis[b]));
    }
  }
  return bank;
}

void validate(const MRFModel& model) {
  if (model.shape.size() == 0) throw ConfigError("MRFModel: empty image shape");
  if (model.filters.size() != model.weights.size()) {
    throw ConfigError("MRFModel: filters and weights differ in length");
  }
  for (const double w : model.weights) {
    if (!(w >= 0.0)) throw ConfigError("MRFModel: weights must be >= 0");
  }
  for (const Kernel& k : model.filters) check_fits(k, model.shape);
  if (model.u0.size() != model.shape.size()) throw ConfigError("MRFModel: u0 shape mismatch");
  if (!(model.lambda >= 0.0)) throw ConfigError("MRFModel: lambda must be >= 0");
}

ValueGrad mrf_f_grad(std::span<const double> u, const MRFModel& model) {
  check_image(model.shape, u);
  ValueGrad out{0.0, Vector(u.size(), 0.0)};
  const auto accumulate = [&](double theta, Vector& response) {
    double energy = 0.0;
    for (double& t : response) {
      energy += phi(t);
      t = theta * phi_prime(t);
    }
    out.value += theta * energy;
  };

  // Separable filters sharing a row factor share the row pass and its adjoint:
  //   sum_a K_(a,b)^T v_a = R_b^T sum_a C_a^T v_a.
  std::vector<const Vector*> row_factors;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < model.filters.size(); ++i) {
    const Kernel& k = model.filters[i];
    if (model.weights[i] == 0.0) continue;
    if (!(k.column_factor && k.row_factor)) {
      Vector response = apply_filter(k, model.shape, u);
      accumulate(model.weights[i], response);
      const Vector back = apply_filter_adjoint(k, model.shape, response);
      for (std::size_t p = 0; p < back.size(); ++p) out.grad[p] += back[p];
      continue;
    }
    std::size_t g = 0;
    while (g < row_factors.size() && *row_factors[g] != *k.row_factor) ++g;
    if (g == row_factors.size()) {
      row_factors.push_back(&*k.row_factor);
      groups.emplace_back();
    }
    groups[g].push_back(i);
  }

  Vector response(u.size());
  Vector folded(u.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Vector rows = pass(u, model.shape, *row_factors[g], 1, false);
    std::fill(folded.begin(), folded.end(), 0.0);
    for (const std::size_t i : groups[g]) {
      const Vector& column = *model.filters[i].column_factor;
      std::fill(response.begin(), response.end(), 0.0);
      pass_into(rows, model.shape, column, 0, false, response);
      accumulate(model.weights[i], response);
      pass_into(response, model.shape, column, 0, true, folded);
    }
    pass_into(folded, model.shape, *row_factors[g], 1, true, out.grad);
  }
  return out;
}

double mrf_lipschitz_bound(const MRFModel& model) {
  double bound = 0.0;
  for (std::size_t i = 0; i < model.filters.size(); ++i) {
    const double norm = filter_norm_estimate(model.filters[i], model.shape);
    bound += 2.0 * model.weights[i] * norm * norm;
  }
  return bound;
}

Objective mrf_objective(const MRFModel& model) {
  validate(model);
  ConvexTerm data = model.data == MrfData::kL2 ? quadratic_data_term(model.u0, model.lambda)
                                               : l1_data_term(model.u0, model.lambda);
  return make_objective(
      [model](std::span<const double> u) { return mrf_f_grad(u, model); }, std::move(data));
}

MRFModel make_dct_mrf_model(const Image& noisy, MrfData data, double lambda,
                            std::size_t filter_size, double target_lipschitz) {
  if (!(target_lipschitz > 0.0)) {
    throw ConfigError("make_dct_mrf_model: target Lipschitz bound must be > 0");
  }
  MRFModel model;
  model.filters = dct_filter_bank(filter_size);
  model.weights.assign(model.filters.size(), 1.0);
  model.shape = noisy.shape;
  model.data = data;
  model.u0 = noisy.pixels;
  model.lambda = lambda;
  validate(model);
  const double unit_bound = mrf_lipschitz_bound(model);
  for (double& w : model.weights) w *= target_lipschitz / unit_bound;
  return model;
}

Vector mrf_initial_point(const MRFModel& model) {
  if (model.data == MrfData::kL2) return model.u0;
  return Vector(model.shape.size(), 0.0);
}

}  // namespace ipiano
