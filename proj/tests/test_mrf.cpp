#include <cmath>
#include <random>

#include "doctest.h"
#include "ipiano/diagnostics.hpp"
#include "ipiano/errors.hpp"
#include "ipiano/problems/mrf.hpp"
#include "oracles.hpp"

using ipiano::Vector;

namespace {

std::size_t reflect(long i, long n) {
  while (i < 0 || i >= n) i = i < 0 ? -1 - i : 2 * n - 1 - i;
  return static_cast<std::size_t>(i);
}

// Direct 2-D convolution with half-sample symmetric boundary.
Vector naive_convolve(const ipiano::Kernel& k, ipiano::ImageShape s, const Vector& u) {
  const long h = static_cast<long>(s.height);
  const long w = static_cast<long>(s.width);
  const long ry = static_cast<long>(k.height / 2);
  const long rx = static_cast<long>(k.width / 2);
  Vector out(u.size(), 0.0);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double sum = 0.0;
      for (long a = -ry; a <= ry; ++a) {
        for (long b = -rx; b <= rx; ++b) {
          sum += k(static_cast<std::size_t>(a + ry), static_cast<std::size_t>(b + rx)) *
                 u[reflect(y - a, h) * s.width + reflect(x - b, w)];
        }
      }
      out[static_cast<std::size_t>(y * w + x)] = sum;
    }
  }
  return out;
}

ipiano::MRFModel small_model(ipiano::MrfData data, std::size_t filters) {
  ipiano::Image img = ipiano::synthetic_image({16, 16});
  for (double& p : img.pixels) p /= 255.0;
  ipiano::MRFModel model = ipiano::make_dct_mrf_model(img, data, 0.5);
  model.filters.resize(filters);
  model.weights.assign(filters, 1.0);
  return model;
}

}  // namespace

TEST_CASE("filters match direct convolution") {
  std::mt19937_64 rng(12);
  const ipiano::ImageShape shape{9, 11};
  const Vector u = oracle::random_vector(shape.size(), rng);
  const auto dense = ipiano::Kernel::dense(3, 5, oracle::random_vector(15, rng));
  const auto sep = ipiano::Kernel::separable(oracle::random_vector(5, rng),
                                             oracle::random_vector(3, rng));
  const auto sep_as_dense = ipiano::Kernel::dense(sep.height, sep.width, sep.taps);
  for (const auto* k : {&dense, &sep, &sep_as_dense}) {
    const Vector got = ipiano::apply_filter(*k, shape, u);
    const Vector want = naive_convolve(*k, shape, u);
    for (std::size_t p = 0; p < u.size(); ++p) CHECK(got[p] == doctest::Approx(want[p]));
  }
  const Vector id = ipiano::apply_filter(ipiano::Kernel::impulse(), shape, u);
  CHECK(id == u);
}

TEST_CASE("filter adjoints") {
  std::mt19937_64 rng(13);
  const ipiano::ImageShape shape{16, 16};
  auto bank = ipiano::dct_filter_bank(7);
  bank.push_back(ipiano::Kernel::dense(3, 3, oracle::random_vector(9, rng)));
  double worst = 0.0;
  for (const auto& k : bank) {
    const Vector u = oracle::random_vector(shape.size(), rng);
    const Vector v = oracle::random_vector(shape.size(), rng);
    const double lhs = ipiano::dot(ipiano::apply_filter(k, shape, u), v);
    const double rhs = ipiano::dot(u, ipiano::apply_filter_adjoint(k, shape, v));
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("kernels") {
  CHECK_THROWS_AS(ipiano::Kernel::dense(2, 3, Vector(6)), ipiano::ConfigError);
  CHECK_THROWS_AS(ipiano::Kernel::dense(3, 3, Vector(8)), ipiano::ConfigError);
  const auto k = ipiano::Kernel::separable({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0});
  CHECK(k(2, 0) == 12.0);
  CHECK(k(0, 2) == 6.0);
  CHECK_THROWS_AS(ipiano::apply_filter(ipiano::dct_filter_bank(7)[0], {5, 5}, Vector(25)),
                  ipiano::ConfigError);
  CHECK_THROWS_AS(ipiano::apply_filter(k, {5, 5}, Vector(24)), ipiano::ConfigError);
}

TEST_CASE("DCT bank is orthonormal and zero-mean") {
  const auto bank = ipiano::dct_filter_bank(7);
  REQUIRE(bank.size() == 48);
  for (std::size_t i = 0; i < bank.size(); ++i) {
    CHECK(bank[i].column_factor.has_value());
    double sum = 0.0;
    for (double t : bank[i].taps) sum += t;
    CHECK(std::abs(sum) <= 1e-12);
    for (std::size_t j = i; j < bank.size(); ++j) {
      const double d = ipiano::dot(bank[i].taps, bank[j].taps);
      CHECK(d == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
  }
  CHECK(ipiano::dct_filter_bank(3).size() == 8);
  CHECK_THROWS_AS(ipiano::dct_filter_bank(4), ipiano::ConfigError);
}

TEST_CASE("operator norm estimates") {
  const ipiano::ImageShape shape{12, 12};
  CHECK(ipiano::filter_norm_estimate(ipiano::Kernel::impulse(), shape) ==
        doctest::Approx(1.0).epsilon(1e-9));
  const auto blur = ipiano::Kernel::separable({0.25, 0.5, 0.25}, {0.25, 0.5, 0.25});
  CHECK(ipiano::filter_norm_estimate(blur, shape, 2000) == doctest::Approx(1.0).epsilon(1e-6));
  const auto blur_dense = ipiano::Kernel::dense(3, 3, blur.taps);
  CHECK(ipiano::filter_norm_estimate(blur_dense, shape, 2000) == doctest::Approx(1.0).epsilon(1e-6));
  const auto diff = ipiano::Kernel::dense(1, 3, {-1.0, 1.0, 0.0});
  const double norm = ipiano::filter_norm_estimate(diff, shape, 500);
  CHECK(norm <= 2.0 + 1e-12);
  CHECK(norm >= 1.9);
}

TEST_CASE("MRF gradient matches central differences") {
  for (auto data : {ipiano::MrfData::kL2, ipiano::MrfData::kL1}) {
    const auto model = small_model(data, 8);
    std::mt19937_64 rng(5);
    const Vector u = oracle::random_vector(model.shape.size(), rng, 0.0, 1.0);
    const auto f = [&](std::span<const double> x) { return ipiano::mrf_f_grad(x, model).value; };
    const auto g = [&](std::span<const double> x) { return ipiano::mrf_f_grad(x, model).grad; };
    CHECK(ipiano::grad_check(f, g, u, 1e-5, 256) <= 1e-6);
  }
}

TEST_CASE("MRF gradient is Lipschitz with the advertised bound") {
  const auto model = small_model(ipiano::MrfData::kL2, 48);
  const double bound = ipiano::mrf_lipschitz_bound(model);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = oracle::random_vector(model.shape.size(), rng, 0.0, 1.0);
    Vector y = x;
    const Vector dir = oracle::random_vector(x.size(), rng, -0.05, 0.05);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += dir[i];
    const double gd = ipiano::distance(ipiano::mrf_f_grad(x, model).grad,
                                       ipiano::mrf_f_grad(y, model).grad);
    CHECK(gd <= bound * ipiano::distance(x, y) * (1.0 + 1e-9));
  }
}

TEST_CASE("DCT model construction") {
  const auto clean = ipiano::synthetic_image({24, 24});
  const auto noisy = ipiano::add_noise(clean, ipiano::GaussianNoise{25.0}, 1);
  const auto l2 = ipiano::make_dct_mrf_model(noisy, ipiano::MrfData::kL2, 0.05);
  CHECK(ipiano::mrf_lipschitz_bound(l2) == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(ipiano::mrf_initial_point(l2) == noisy.pixels);
  const auto l1 = ipiano::make_dct_mrf_model(noisy, ipiano::MrfData::kL1, 0.5);
  CHECK(ipiano::mrf_initial_point(l1) == Vector(noisy.pixels.size(), 0.0));

  const auto obj = ipiano::mrf_objective(l2);
  const Vector& u = noisy.pixels;
  CHECK(obj.value(u) == doctest::Approx(ipiano::mrf_f_grad(u, l2).value));

  auto broken = l2;
  broken.weights.pop_back();
  CHECK_THROWS_AS(ipiano::validate(broken), ipiano::ConfigError);
  broken = l2;
  broken.lambda = -1.0;
  CHECK_THROWS_AS(ipiano::mrf_objective(broken), ipiano::ConfigError);
}
