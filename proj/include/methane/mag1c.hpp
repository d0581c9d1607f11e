#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "methane/background_stats.hpp"
#include "methane/detectors.hpp"
#include "methane/types.hpp"

namespace methane {

struct Mag1cConfig {
  std::size_t n_iter = 30;
  double epsilon = 1e-6;
  double fraction = 0.01;  // Mag1c-SAS sample fraction
  ApplyMode mode = ApplyMode::kColumn;

  void validate() const;
};

// What the parameter stage hands to the lightweight filter.
struct Mag1cParams {
  Eigen::VectorXd mu;     // final-iteration band means
  Eigen::VectorXd t_vec;  // C^-1 (mu .* s)
  double m = 0.0;         // (mu .* s)^T t_vec, unclamped
};

struct AlbedoWeights {
  std::vector<double> r;
};

// r_i = x_i^T mu / mu^T mu. Throws ValidationError when mu is zero.
AlbedoWeights albedo_weights(const PixelView& pixels, const Eigen::VectorXd& mu);

// Replaces non-positive albedo factors by kMinAlbedo (with one warning per
// call naming the count).
inline constexpr double kMinAlbedo = 1e-6;
void clamp_albedo(AlbedoWeights& weights, std::string_view context);

// Result of the iterative albedo-corrected, reweighted-L1 matched filter on
// one scope (a column or a whole tile).
struct ScopeResult {
  std::vector<double> alpha;        // alpha^{n_iter}, one per pixel
  Eigen::VectorXd mu;               // mu^{n_iter}
  Eigen::MatrixXd covariance;       // C^{n_iter}
  Eigen::VectorXd t_vec;            // (C^{n_iter})^-1 (mu^{n_iter} .* s)
  double m = 0.0;                   // unclamped (mu .* s)^T t_vec
  std::vector<double> mean_alpha;   // mean alpha after each iteration 1..n_iter
};

// Runs the iterative filter on `pixels`. Each iteration re-estimates the
// band means and covariance with the previous methane estimate removed, then
// applies the sparsity-weighted, ReLU-clamped filter. The covariance update
// is evaluated as a low-rank correction of the initial covariance, which is
// algebraically identical to re-summing the residual outer products.
ScopeResult albedo_reweight_l1_filter(const PixelView& pixels, const Eigen::VectorXd& target,
                                      const Mag1cConfig& config, std::string_view context = "mag1c");

// Original Mag1c (config.mode column) or its tile-wise variant.
EnhancementMap mag1c(const HyperCube& cube, const TargetSpectrum& target, const Mag1cConfig& config);

// Flat pixel indices floor(j * n / k), j = 0..k-1, with k = max(2, floor(n f)).
std::vector<std::size_t> sample_indices(std::size_t pixel_count, double fraction);
// The sampled pixel vectors, gathered row-wise (k x p floats).
std::vector<float> sample_uniform(const HyperCube& cube, double fraction);

Mag1cParams compute_parameters(const PixelView& sample, const Eigen::VectorXd& target, const Mag1cConfig& config);

struct LightweightOptions {
  bool sparsity = true;  // false forces w = 0
  bool relu = true;      // false skips the max(., 0)
};

// Second Mag1c-SAS stage over every pixel: a single filter pass from the
// frozen parameters followed by n_iter sparsity-only updates.
std::vector<double> lightweight_filter(const PixelView& pixels, const Mag1cParams& params, const Mag1cConfig& config,
                                       LightweightOptions options = {});

EnhancementMap mag1c_sas(const HyperCube& cube, const TargetSpectrum& target, const Mag1cConfig& config);

}  // namespace methane
