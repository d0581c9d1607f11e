#include "methane/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "json.hpp"
#include "methane/error.hpp"

namespace methane {
namespace {

// Portable normal deviates: mt19937_64 output is fixed by the standard, and
// the Box-Muller transform below avoids the implementation-defined
// std::normal_distribution.
class Normal {
 public:
  explicit Normal(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // (0, 1) exclusive at both ends.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Three smooth spectral factors (Legendre P0..P2 over the band range), scaled
// by the background mean so the variation is relative.
std::vector<std::array<double, 3>> spectral_factors(const SceneConfig& c) {
  const std::size_t p = c.bands();
  const double lo = c.wavelengths.front();
  const double hi = c.wavelengths.back();
  std::vector<std::array<double, 3>> f(p);
  for (std::size_t b = 0; b < p; ++b) {
    const double x = hi > lo ? 2.0 * (c.wavelengths[b] - lo) / (hi - lo) - 1.0 : 0.0;
    const double mu = c.background_mean[b];
    f[b] = {mu, mu * x, mu * (1.5 * x * x - 0.5)};
  }
  return f;
}

double smooth_field(const std::vector<std::array<double, 4>>& waves, double row, double col, double h, double w) {
  double v = 0.0;
  for (const auto& [fy, fx, phase, amp] : waves) {
    v += amp * std::sin(2.0 * std::numbers::pi * (fy * row / h + fx * col / w) + phase);
  }
  return v;
}

}  // namespace

void SceneConfig::validate() const {
  const std::size_t p = bands();
  if (height < 1 || width < 1) throw ValidationError("scene needs at least one pixel");
  if (p < 1) throw ValidationError("scene needs at least one band");
  if (target.size() != p || background_mean.size() != p || noise_sigma.size() != p) {
    throw ValidationError("scene per-band arrays must match the wavelength count");
  }
  if (!(background_cov_scale >= 0.0)) throw ValidationError("background_cov_scale must be non-negative");
  if (!(albedo_min > 0.0 && albedo_min <= albedo_max)) throw ValidationError("albedo range must satisfy 0 < min <= max");
  if (!(albedo_texture >= 0.0)) throw ValidationError("albedo_texture must be non-negative");
  for (double s : noise_sigma) {
    if (!(s >= 0.0)) throw ValidationError("noise_sigma must be non-negative");
  }
  for (const auto& plume : plumes) {
    if (!(plume.radius > 0.0)) throw ValidationError("plume radius must be positive");
    if (!(plume.peak_alpha >= 0.0)) throw ValidationError("plume peak_alpha must be non-negative");
  }
}

Scene generate_scene(const SceneConfig& c) {
  c.validate();
  const std::size_t h = c.height;
  const std::size_t w = c.width;
  const std::size_t p = c.bands();
  Normal normal(c.seed);

  // Low-frequency albedo pattern: four random plane waves.
  std::vector<std::array<double, 4>> waves(4);
  for (auto& wave : waves) {
    wave = {2.0 * normal.uniform() - 1.0, 2.0 * normal.uniform() - 1.0, 2.0 * std::numbers::pi * normal.uniform(),
            0.5 + 0.5 * normal.uniform()};
  }
  double amp_sum = 0.0;
  for (const auto& wave : waves) amp_sum += wave[3];

  const auto factors = spectral_factors(c);
  const double factor_scale = std::sqrt(c.background_cov_scale);
  std::vector<double> white(p);
  for (std::size_t b = 0; b < p; ++b) {
    const double floor_var = kS0Floor * c.background_mean[b] * c.background_mean[b];
    white[b] = std::sqrt(c.background_cov_scale * floor_var + c.noise_sigma[b] * c.noise_sigma[b]);
  }

  Scene scene;
  scene.mask = PlumeMask(h, w);
  scene.alpha.assign(h * w, 0.0);
  scene.albedo.assign(h * w, 0.0);
  std::vector<float> data(h * w * p);
  const double mid = 0.5 * (c.albedo_min + c.albedo_max);
  const double half = 0.5 * (c.albedo_max - c.albedo_min);

  for (std::size_t row = 0; row < h; ++row) {
    for (std::size_t col = 0; col < w; ++col) {
      const std::size_t i = row * w + col;
      double alpha = 0.0;
      bool inside = false;
      for (const auto& plume : c.plumes) {
        const double dr = static_cast<double>(row) - plume.row;
        const double dc = static_cast<double>(col) - plume.col;
        const double a = plume.peak_alpha * std::exp(-(dr * dr + dc * dc) / (2.0 * plume.radius * plume.radius));
        alpha = std::max(alpha, a);
        inside = inside || (plume.peak_alpha > 0.0 && a > kMaskFraction * plume.peak_alpha);
      }
      scene.alpha[i] = alpha;
      scene.mask.values[i] = inside ? 1 : 0;

      const double pattern = smooth_field(waves, static_cast<double>(row), static_cast<double>(col),
                                          static_cast<double>(h), static_cast<double>(w)) / amp_sum;
      const double z0 = normal();
      const double z1 = normal();
      const double z2 = normal();
      const double texture = normal();
      const double albedo =
          std::clamp(mid + half * pattern + mid * c.albedo_texture * texture, c.albedo_min, c.albedo_max);
      scene.albedo[i] = albedo;

      float* px = data.data() + i * p;
      for (std::size_t b = 0; b < p; ++b) {
        const auto& f = factors[b];
        const double correlated = factor_scale * (f[0] * z0 + f[1] * z1 + f[2] * z2);
        const double background = c.background_mean[b] + correlated + white[b] * normal();
        double value = 0.0;
        if (c.injection == Injection::kAdditive) {
          value = albedo * (background + alpha * c.background_mean[b] * c.target[b]);
        } else {
          value = albedo * background * std::exp(alpha * c.target[b]);
        }
        px[b] = static_cast<float>(value);
      }
    }
  }
  scene.cube = HyperCube(h, w, c.wavelengths, std::move(data));
  scene.spectrum = TargetSpectrum(c.wavelengths, c.target);
  return scene;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t bands) {
  if (bands < 1) throw ValidationError("grid needs at least one band");
  if (bands == 1) return {lo};
  if (!(lo < hi)) throw ValidationError("grid requires lo < hi");
  std::vector<double> grid(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    grid[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bands - 1);
  }
  return grid;
}

std::vector<double> methane_range_grid(std::size_t bands) { return uniform_grid(1573.0, 2480.0, bands); }

std::vector<double> synthetic_methane_absorption(const std::vector<double>& wavelengths) {
  struct Feature {
    double centre, width, depth;
  };
  static constexpr Feature kFeatures[] = {
      {1645.0, 10.0, 0.20}, {1666.0, 7.0, 0.45}, {1705.0, 12.0, 0.12}, {2175.0, 15.0, 0.15},
      {2205.0, 12.0, 0.22}, {2255.0, 14.0, 0.35}, {2300.0, 10.0, 0.60}, {2320.0, 9.0, 1.00},
      {2345.0, 8.0, 0.75}, {2370.0, 9.0, 0.90}, {2395.0, 10.0, 0.55}, {2425.0, 12.0, 0.45},
      {2455.0, 14.0, 0.35},
  };
  std::vector<double> s(wavelengths.size(), 0.0);
  for (std::size_t b = 0; b < wavelengths.size(); ++b) {
    double v = 0.0;
    for (const auto& f : kFeatures) {
      const double d = (wavelengths[b] - f.centre) / f.width;
      v -= f.depth * std::exp(-0.5 * d * d);
    }
    // Broad continuum-level absorption keeps every band weakly sensitive.
    v -= 0.01;
    s[b] = v;
  }
  const double peak = *std::min_element(s.begin(), s.end());
  for (double& v : s) v /= -peak;
  return s;
}

std::vector<double> default_background_mean(const std::vector<double>& wavelengths) {
  std::vector<double> mu(wavelengths.size());
  for (std::size_t b = 0; b < wavelengths.size(); ++b) {
    const double x = (wavelengths[b] - 2000.0) / 500.0;
    mu[b] = 0.8 + 0.03 * std::cos(1.3 * x) - 0.02 * x;
  }
  return mu;
}

std::vector<double> background_sigma(const SceneConfig& c) {
  const auto factors = spectral_factors(c);
  std::vector<double> sigma(c.bands());
  for (std::size_t b = 0; b < c.bands(); ++b) {
    const auto& f = factors[b];
    const double s0 = f[0] * f[0] + f[1] * f[1] + f[2] * f[2] + kS0Floor * c.background_mean[b] * c.background_mean[b];
    sigma[b] = std::sqrt(c.background_cov_scale * s0 + c.noise_sigma[b] * c.noise_sigma[b]);
  }
  return sigma;
}

double strong_plume_peak(const SceneConfig& c, double factor) {
  const auto sigma = background_sigma(c);
  std::size_t best = 0;
  double best_signal = 0.0;
  for (std::size_t b = 0; b < c.bands(); ++b) {
    const double signal = std::abs(c.background_mean[b] * c.target[b]);
    if (signal > best_signal) {
      best_signal = signal;
      best = b;
    }
  }
  if (best_signal == 0.0) throw ValidationError("target has no absorption on this grid");
  return factor * sigma[best] / best_signal;
}

SceneConfig strong_plume_scene(std::size_t height, std::size_t width, std::vector<double> wavelengths,
                               std::uint64_t seed) {
  SceneConfig c;
  c.height = height;
  c.width = width;
  c.target = synthetic_methane_absorption(wavelengths);
  c.background_mean = default_background_mean(wavelengths);
  c.noise_sigma.assign(wavelengths.size(), 0.002);
  c.wavelengths = std::move(wavelengths);
  c.seed = seed;
  // Plume placement uses its own stream so the scene noise stays tied to seed.
  std::mt19937_64 placement(seed ^ 0x9E3779B97F4A7C15ull);
  auto uniform = [&] { return (static_cast<double>(placement() >> 11) + 0.5) * 0x1.0p-53; };
  const double extent = static_cast<double>(std::min(height, width));
  Plume plume;
  plume.radius = extent * (1.0 / 25.0 + uniform() * (1.0 / 20.0 - 1.0 / 25.0));
  const double margin = std::min(3.0 * plume.radius, 0.5 * extent);
  plume.row = margin + uniform() * std::max(0.0, static_cast<double>(height) - 2.0 * margin);
  plume.col = margin + uniform() * std::max(0.0, static_cast<double>(width) - 2.0 * margin);
  c.plumes = {plume};
  c.plumes.front().peak_alpha = strong_plume_peak(c, 5.0);
  return c;
}

SceneConfig strong_plume_scene(std::size_t height, std::size_t width, std::size_t bands, std::uint64_t seed) {
  return strong_plume_scene(height, width, methane_range_grid(bands), seed);
}

std::string to_json(const SceneConfig& c) {
  nlohmann::json plumes = nlohmann::json::array();
  for (const auto& pl : c.plumes) {
    plumes.push_back({{"row", pl.row}, {"col", pl.col}, {"radius", pl.radius}, {"peak_alpha", pl.peak_alpha}});
  }
  nlohmann::json j = {{"height", c.height},
                      {"width", c.width},
                      {"bands", c.bands()},
                      {"wavelengths", c.wavelengths},
                      {"target", c.target},
                      {"background_mean", c.background_mean},
                      {"background_cov_scale", c.background_cov_scale},
                      {"albedo_min", c.albedo_min},
                      {"albedo_max", c.albedo_max},
                      {"albedo_texture", c.albedo_texture},
                      {"plumes", plumes},
                      {"noise_sigma", c.noise_sigma},
                      {"seed", c.seed},
                      {"injection", c.injection == Injection::kAdditive ? "additive" : "multiplicative"},
                      {"mask_fraction", kMaskFraction}};
  return j.dump(2);
}

}  // namespace methane
