#include "ipiano/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "ipiano/errors.hpp"

#ifdef IPIANO_HAVE_PNG
#include <png.h>
#endif

namespace ipiano {
namespace {

// Skips whitespace and '#' comments between PGM header tokens.
void skip_separators(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

std::size_t read_header_value(std::istream& in, const std::filesystem::path& path) {
  skip_separators(in);
  std::size_t value = 0;
  if (!(in >> value)) throw ConfigError("malformed PGM header in " + path.string());
  return value;
}

std::uint8_t to_byte(double v) {
  if (!std::isfinite(v)) return 0;
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

std::string lowercase_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open image " + path.string());
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5") throw ConfigError(path.string() + " is not a binary PGM (P5)");

  Image image;
  image.shape.width = read_header_value(in, path);
  image.shape.height = read_header_value(in, path);
  const std::size_t maxval = read_header_value(in, path);
  if (image.shape.size() == 0 || maxval == 0 || maxval > 65535) {
    throw ConfigError("unsupported PGM header in " + path.string());
  }
  in.get();  // single whitespace before the raster

  const std::size_t n = image.shape.size();
  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(n * bytes_per_sample);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw ConfigError("truncated PGM raster in " + path.string());
  }
  image.pixels.resize(n);
  const double scale = 255.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = bytes_per_sample == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
    image.pixels[i] = static_cast<double>(v) * scale;
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write image " + path.string());
  out << "P5\n" << image.shape.width << ' ' << image.shape.height << "\n255\n";
  std::vector<std::uint8_t> raw(image.pixels.size());
  std::transform(image.pixels.begin(), image.pixels.end(), raw.begin(), to_byte);
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw ConfigError("failed writing " + path.string());
}

bool png_supported() {
#ifdef IPIANO_HAVE_PNG
  return true;
#else
  return false;
#endif
}

Image read_png(const std::filesystem::path& path) {
#ifdef IPIANO_HAVE_PNG
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw ConfigError("cannot read PNG " + path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, raw.data(), 0, nullptr)) {
    png_image_free(&png);
    throw ConfigError("cannot decode PNG " + path.string() + ": " + png.message);
  }
  Image image;
  image.shape = {png.height, png.width};
  image.pixels.assign(raw.begin(), raw.end());
  return image;
#else
  throw ConfigError("PNG support not compiled in; cannot read " + path.string());
#endif
}

void write_png(const std::filesystem::path& path, const Image& image) {
#ifdef IPIANO_HAVE_PNG
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.shape.width);
  png.height = static_cast<png_uint_32>(image.shape.height);
  png.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> raw(image.pixels.size());
  std::transform(image.pixels.begin(), image.pixels.end(), raw.begin(), to_byte);
  if (!png_image_write_to_file(&png, path.c_str(), 0, raw.data(), 0, nullptr)) {
    throw ConfigError("cannot write PNG " + path.string() + ": " + png.message);
  }
#else
  throw ConfigError("PNG support not compiled in; cannot write " + path.string());
#endif
}

Image read_image(const std::filesystem::path& path) {
  const std::string ext = lowercase_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm") return read_pgm(path);
  throw ConfigError("unsupported image format: " + path.string());
}

void write_image(const std::filesystem::path& path, const Image& image) {
  const std::string ext = lowercase_extension(path);
  if (ext == ".png") return write_png(path, image);
  if (ext == ".pgm") return write_pgm(path, image);
  throw ConfigError("unsupported image format: " + path.string());
}

Image synthetic_image(ImageShape shape) {
  if (shape.size() == 0) throw ConfigError("synthetic_image: empty shape");
  Image image{shape, Vector(shape.size())};
  const auto edge = [](double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
  };
  for (std::size_t y = 0; y < shape.height; ++y) {
    for (std::size_t x = 0; x < shape.width; ++x) {
      const double u = (static_cast<double>(x) + 0.5) / static_cast<double>(shape.width);
      const double v = (static_cast<double>(y) + 0.5) / static_cast<double>(shape.height);
      double value = 60.0 + 80.0 * u;
      if (u >= 0.12 && u <= 0.5 && v >= 0.15 && v <= 0.5) value = 205.0;
      const double du = u - 0.68;
      const double dv = v - 0.6;
      if (du * du + dv * dv <= 0.2 * 0.2) value = 25.0;
      const double e1 = edge(0.15, 0.92, 0.45, 0.6, u, v);
      const double e2 = edge(0.45, 0.6, 0.55, 0.95, u, v);
      const double e3 = edge(0.55, 0.95, 0.15, 0.92, u, v);
      if ((e1 >= 0 && e2 >= 0 && e3 >= 0) || (e1 <= 0 && e2 <= 0 && e3 <= 0)) {
        value = 160.0;
      }
      image(y, x) = value;
    }
  }
  return image;
}

Image add_noise(const Image& clean, const NoiseSpec& noise, std::uint64_t seed) {
  Image noisy = clean;
  std::mt19937_64 rng(seed);
  if (const auto* gaussian = std::get_if<GaussianNoise>(&noise)) {
    if (!(gaussian->sigma >= 0.0)) throw ConfigError("add_noise: sigma must be >= 0");
    if (gaussian->sigma == 0.0) return noisy;
    std::normal_distribution<double> dist(0.0, gaussian->sigma);
    for (double& p : noisy.pixels) p += dist(rng);
    return noisy;
  }
  const double fraction = std::get<SaltPepperNoise>(noise).fraction;
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ConfigError("add_noise: salt & pepper fraction must be in [0,1]");
  }
  const std::size_t n = noisy.pixels.size();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution salt(0.5);
  for (std::size_t k = 0; k < count; ++k) noisy.pixels[order[k]] = salt(rng) ? 255.0 : 0.0;
  return noisy;
}

double mse(std::span<const double> u, std::span<const double> u0) {
  if (u.size() != u0.size()) throw ConfigError("mse: shape mismatch");
  if (u.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - u0[i];
    sum += d * d;
  }
  return sum / static_cast<double>(u.size());
}

double mask_density(std::span<const double> c, double eps) {
  if (c.empty()) return 0.0;
  const auto selected = std::count_if(c.begin(), c.end(),
                                      [eps](double v) { return std::abs(v) > eps; });
  return static_cast<double>(selected) / static_cast<double>(c.size());
}

}  // namespace ipiano
