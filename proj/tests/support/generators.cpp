#include "support/generators.hpp"

#include <cmath>
#include <numbers>

namespace methane::testing {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<double> increasing_wavelengths(Rng& rng, std::size_t bands, double start) {
  std::vector<double> wl(bands);
  double w = start;
  for (auto& v : wl) {
    v = w;
    w += rng.uniform(2.0, 20.0);
  }
  return wl;
}

HyperCube random_cube(Rng& rng, std::size_t height, std::size_t width, std::size_t bands) {
  std::vector<double> mean(bands);
  for (auto& m : mean) m = rng.uniform(0.5, 1.5);
  const std::size_t rank = 3;
  std::vector<double> mix(bands * rank);
  for (auto& v : mix) v = rng.normal() * 0.1;
  std::vector<double> floor(bands);
  for (auto& f : floor) f = rng.uniform(0.01, 0.05);
  std::vector<float> data(height * width * bands);
  std::vector<double> z(rank);
  for (std::size_t i = 0; i < height * width; ++i) {
    for (auto& v : z) v = rng.normal();
    for (std::size_t b = 0; b < bands; ++b) {
      double x = mean[b] + floor[b] * rng.normal();
      for (std::size_t r = 0; r < rank; ++r) x += mix[b * rank + r] * z[r];
      data[i * bands + b] = static_cast<float>(x);
    }
  }
  return HyperCube(height, width, increasing_wavelengths(rng, bands), std::move(data));
}

HyperCube dyadic_cube(Rng& rng, std::size_t height, std::size_t width, std::size_t bands) {
  const auto cube = random_cube(rng, height, width, bands);
  std::vector<float> data(cube.data().begin(), cube.data().end());
  for (auto& v : data) v = std::round(v * 1024.0f) / 1024.0f;
  return HyperCube(height, width, cube.wavelengths(), std::move(data));
}

TargetSpectrum random_target(Rng& rng, const std::vector<double>& wavelengths) {
  std::vector<double> values(wavelengths.size());
  for (auto& v : values) v = (rng.coin(0.8) ? -1.0 : 1.0) * rng.uniform(0.05, 1.0);
  return TargetSpectrum(wavelengths, std::move(values));
}

PlumeMask random_mask(Rng& rng, std::size_t height, std::size_t width, double density) {
  PlumeMask mask(height, width);
  for (auto& v : mask.values) v = rng.coin(density) ? 1 : 0;
  return mask;
}

EnhancementMap random_map(Rng& rng, std::size_t height, std::size_t width, std::size_t levels) {
  EnhancementMap map{height, width, std::vector<double>(height * width), "random"};
  for (auto& v : map.values) v = static_cast<double>(rng.index(levels)) / static_cast<double>(levels) - 0.3;
  return map;
}

std::vector<std::vector<double>> pixels_of(const HyperCube& cube) {
  std::vector<std::vector<double>> out(cube.pixel_count());
  for (std::size_t i = 0; i < cube.pixel_count(); ++i) {
    const auto px = cube.pixel(i);
    out[i].assign(px.begin(), px.end());
  }
  return out;
}

std::vector<std::vector<double>> column_pixels(const HyperCube& cube, std::size_t col) {
  std::vector<std::vector<double>> out(cube.height());
  for (std::size_t row = 0; row < cube.height(); ++row) {
    const auto px = cube.pixel(row, col);
    out[row].assign(px.begin(), px.end());
  }
  return out;
}

}  // namespace methane::testing
