#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "methane/types.hpp"

namespace methane {

// A radial Gaussian methane bump: alpha(d) = peak_alpha * exp(-d^2 / (2 radius^2)),
// d being the pixel distance to (row, col).
struct Plume {
  double row = 0.0;
  double col = 0.0;
  double radius = 1.0;
  double peak_alpha = 0.0;
};

// additive:       x = a (b + alpha mu .* s), the linear model Mag1c assumes.
// multiplicative: x = a b .* exp(alpha s), Beer-Lambert style.
enum class Injection { kAdditive, kMultiplicative };

struct SceneConfig {
  std::size_t height = 256;
  std::size_t width = 256;
  std::vector<double> wavelengths;      // nm, strictly increasing
  std::vector<double> target;           // unit absorption s per band
  std::vector<double> background_mean;  // per band
  // Correlated background noise has covariance background_cov_scale * S0,
  // S0 = F F^T + diag(S0_floor * mean^2) with three smooth spectral factors F.
  double background_cov_scale = 4e-4;
  double albedo_min = 0.8;
  double albedo_max = 1.2;
  double albedo_texture = 0.02;  // per-pixel relative albedo jitter (std)
  std::vector<Plume> plumes;
  std::vector<double> noise_sigma;  // white noise std per band
  std::uint64_t seed = 0;
  Injection injection = Injection::kAdditive;

  std::size_t bands() const { return wavelengths.size(); }
  void validate() const;
};

struct Scene {
  HyperCube cube;
  PlumeMask mask;             // alpha > 0.05 * peak_alpha of the dominant plume
  std::vector<double> alpha;  // per pixel, max over plumes
  std::vector<double> albedo;
  TargetSpectrum spectrum;
};

inline constexpr double kMaskFraction = 0.05;
inline constexpr double kS0Floor = 0.01;

Scene generate_scene(const SceneConfig& config);

// Evenly spaced band centres, lo and hi included.
std::vector<double> uniform_grid(double lo, double hi, std::size_t bands);
// Default methane-range grid: 122 bands over 1573-2480 nm.
std::vector<double> methane_range_grid(std::size_t bands = 122);

// Synthetic unit methane absorption (non-positive, minimum -1) built from
// Gaussian absorption features near 1666 nm and 2200-2460 nm.
std::vector<double> synthetic_methane_absorption(const std::vector<double>& wavelengths);
std::vector<double> default_background_mean(const std::vector<double>& wavelengths);

// Per-band background std before albedo: sqrt(scale * S0_bb + sigma_b^2).
std::vector<double> background_sigma(const SceneConfig& config);

// peak_alpha for which the plume perturbation at the most affected band is
// `factor` times that band's background std.
double strong_plume_peak(const SceneConfig& config, double factor = 5.0);

// Default strong-plume scene: one plume with radius ~ min(H, W) / 25..1/20,
// centre drawn from the seed, peak from strong_plume_peak(5).
SceneConfig strong_plume_scene(std::size_t height, std::size_t width, std::vector<double> wavelengths,
                               std::uint64_t seed);
SceneConfig strong_plume_scene(std::size_t height, std::size_t width, std::size_t bands, std::uint64_t seed);

// JSON echo of every config field.
std::string to_json(const SceneConfig& config);

}  // namespace methane
