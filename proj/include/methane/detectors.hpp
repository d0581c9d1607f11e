#pragma once

#include <string_view>

#include "methane/background_stats.hpp"
#include "methane/types.hpp"

namespace methane {

// tile: background statistics from the whole image.
// column: statistics estimated separately for every image column (one
// push-broom sensor element), each with H pixels.
enum class ApplyMode { kTile, kColumn };

std::string_view to_string(ApplyMode mode);
ApplyMode parse_mode(std::string_view name);

// Classical matched filter with stats frozen:
//   y = (x - mu)^T C^-1 (t - mu) / ((t - mu)^T C^-1 (t - mu)).
class MatchedFilterModel {
 public:
  MatchedFilterModel(const BackgroundStats& stats, const Eigen::VectorXd& target, std::string_view context = "mf");
  double score(const float* pixel) const;
  double score(const Eigen::VectorXd& pixel) const;

 private:
  Eigen::VectorXd weights_;  // C^-1 (t - mu) / denominator
  double offset_ = 0.0;      // mu^T weights
};

// Constrained energy minimization, y = x^T K^-1 t / (t^T K^-1 t), with K the
// raw (uncentred) correlation matrix.
class CemModel {
 public:
  CemModel(const BackgroundStats& stats, const Eigen::VectorXd& target, std::string_view context = "cem");
  double score(const float* pixel) const;
  double score(const Eigen::VectorXd& pixel) const;

 private:
  Eigen::VectorXd weights_;
};

// Adaptive cosine estimator: squared cosine between x - mu and t - mu in the
// C^-1 inner product. Pixels whose whitened energy is below kMinEnergy score 0.
class AceModel {
 public:
  static constexpr double kMinEnergy = 1e-12;

  AceModel(const BackgroundStats& stats, const Eigen::VectorXd& target, std::string_view context = "ace");
  double score(const Eigen::VectorXd& pixel) const;
  // Scores `count` pixels of `pixels` starting at `begin` into out[0..count).
  void score_block(const PixelView& pixels, std::size_t begin, std::size_t count, double* out) const;

 private:
  SpdFactor factor_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd target_white_;  // L^-1 (t - mu)
  double target_energy_ = 0.0;
};

EnhancementMap matched_filter(const HyperCube& cube, const TargetSpectrum& target, ApplyMode mode = ApplyMode::kTile);
EnhancementMap cem(const HyperCube& cube, const TargetSpectrum& target, ApplyMode mode = ApplyMode::kTile);
EnhancementMap ace(const HyperCube& cube, const TargetSpectrum& target, ApplyMode mode = ApplyMode::kTile);

}  // namespace methane
