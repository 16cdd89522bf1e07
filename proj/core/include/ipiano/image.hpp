#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>

#include "ipiano/vector_ops.hpp"

namespace ipiano {

struct ImageShape {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return height * width; }
  bool operator==(const ImageShape&) const = default;
};

// Grayscale image, row-major, double precision on the [0, 255] scale.
struct Image {
  ImageShape shape;
  Vector pixels;

  double operator()(std::size_t y, std::size_t x) const { return pixels[y * shape.width + x]; }
  double& operator()(std::size_t y, std::size_t x) { return pixels[y * shape.width + x]; }
};

// 8-bit binary PGM (P5). Writing rounds and clamps to [0, 255].
Image read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Image& image);

// 8-bit grayscale PNG; throws ConfigError when built without libpng.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);
bool png_supported();

// Dispatch on the file extension (.pgm or .png).
Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& image);

// Deterministic test scene: shaded background, a rectangle, a disk and a
// triangle, scaled to the requested shape.
Image synthetic_image(ImageShape shape);

struct GaussianNoise {
  double sigma = 0.0;
};
struct SaltPepperNoise {
  double fraction = 0.0;
};
using NoiseSpec = std::variant<GaussianNoise, SaltPepperNoise>;

// Gaussian: additive zero-mean noise, not clamped.
// Salt & pepper: exactly round(fraction * N) distinct pixels are set to 0 or
// 255 with equal probability.
Image add_noise(const Image& clean, const NoiseSpec& noise, std::uint64_t seed);

double mse(std::span<const double> u, std::span<const double> u0);

// Fraction of entries with |c_i| > eps.
double mask_density(std::span<const double> c, double eps = 1e-8);

}  // namespace ipiano
