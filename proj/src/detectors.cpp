#include "methane/detectors.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "methane/error.hpp"
#include "methane/parallel.hpp"

namespace methane {

std::string_view to_string(ApplyMode mode) { return mode == ApplyMode::kTile ? "tile" : "column"; }

ApplyMode parse_mode(std::string_view name) {
  if (name == "tile") return ApplyMode::kTile;
  if (name == "column") return ApplyMode::kColumn;
  throw ValidationError("unknown apply mode '" + std::string(name) + "'");
}

namespace {

double dot(const float* x, const Eigen::VectorXd& w) {
  double acc = 0.0;
  for (Eigen::Index b = 0; b < w.size(); ++b) acc += static_cast<double>(x[b]) * w[b];
  return acc;
}

void check_denominator(double denom, const Eigen::VectorXd& target, std::string_view context) {
  if (!(denom >= 1e-12 * target.squaredNorm())) {
    throw DegenerateTargetError(std::string(context) +
                                ": target is indistinguishable from the background (whitened energy " +
                                std::to_string(denom) + ")");
  }
}

// Output slot of scope pixel i is out[i * stride].
struct ScopeOutput {
  double* out;
  std::size_t stride;
  double& operator[](std::size_t i) const { return out[i * stride]; }
};

using ScopeScorer = std::function<void(const PixelView& scope, const std::string& context, ScopeOutput out)>;

// Fits a model on each scope's own pixels, then scores that scope.
EnhancementMap run_scoped(const HyperCube& cube, ApplyMode mode, const char* tag, const ScopeScorer& scorer) {
  EnhancementMap map{cube.height(), cube.width(), std::vector<double>(cube.pixel_count()), tag};
  const std::size_t w = cube.width();
  if (mode == ApplyMode::kTile) {
    scorer(PixelView::tile(cube), std::string(tag) + " tile", {map.values.data(), 1});
  } else {
    if (cube.height() < 2) throw ValidationError("column mode needs at least 2 rows per column");
    parallel_chunks(w, 1, [&](std::size_t begin, std::size_t end) {
      for (std::size_t col = begin; col < end; ++col) {
        scorer(PixelView::column(cube, col), std::string(tag) + " column " + std::to_string(col),
               {map.values.data() + col, w});
      }
    });
  }
  return map;
}

}  // namespace

MatchedFilterModel::MatchedFilterModel(const BackgroundStats& stats, const Eigen::VectorXd& target,
                                       std::string_view context) {
  const Eigen::VectorXd diff = target - stats.mean;
  const Eigen::VectorXd solved = SpdFactor(stats.matrix, context).solve(diff);
  const double denom = diff.dot(solved);
  check_denominator(denom, target, context);
  weights_ = solved / denom;
  offset_ = stats.mean.dot(weights_);
}

double MatchedFilterModel::score(const float* pixel) const { return dot(pixel, weights_) - offset_; }
double MatchedFilterModel::score(const Eigen::VectorXd& pixel) const { return pixel.dot(weights_) - offset_; }

CemModel::CemModel(const BackgroundStats& stats, const Eigen::VectorXd& target, std::string_view context) {
  const Eigen::VectorXd solved = SpdFactor(stats.matrix, context).solve(target);
  const double denom = target.dot(solved);
  check_denominator(denom, target, context);
  weights_ = solved / denom;
}

double CemModel::score(const float* pixel) const { return dot(pixel, weights_); }
double CemModel::score(const Eigen::VectorXd& pixel) const { return pixel.dot(weights_); }

AceModel::AceModel(const BackgroundStats& stats, const Eigen::VectorXd& target, std::string_view context)
    : factor_(stats.matrix, context), mean_(stats.mean) {
  target_white_ = factor_.whiten(target - mean_);
  target_energy_ = target_white_.squaredNorm();
  check_denominator(target_energy_, target, context);
}

double AceModel::score(const Eigen::VectorXd& pixel) const {
  const Eigen::VectorXd z = factor_.whiten(pixel - mean_);
  const double energy = z.squaredNorm();
  if (energy < kMinEnergy) return 0.0;
  const double num = z.dot(target_white_);
  return num * num / (target_energy_ * energy);
}

void AceModel::score_block(const PixelView& pixels, std::size_t begin, std::size_t count, double* out) const {
  const auto p = static_cast<Eigen::Index>(pixels.bands());
  Eigen::MatrixXd block(p, static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    block.col(static_cast<Eigen::Index>(i)) = pixels.vec(begin + i).cast<double>() - mean_;
  }
  factor_.whiten_in_place(block);
  const Eigen::RowVectorXd num = target_white_.transpose() * block;
  const Eigen::RowVectorXd energy = block.colwise().squaredNorm();
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    out[i] = energy[j] < kMinEnergy ? 0.0 : num[j] * num[j] / (target_energy_ * energy[j]);
  }
}

EnhancementMap matched_filter(const HyperCube& cube, const TargetSpectrum& target, ApplyMode mode) {
  check_alignment(cube, target);
  const Eigen::VectorXd t = to_eigen(target.values());
  return run_scoped(cube, mode, "mf", [&](const PixelView& scope, const std::string& context, ScopeOutput out) {
    const MatchedFilterModel model(estimate(scope, MatrixKind::kCenteredCovariance, Divisor::kNMinus1), t, context);
    parallel_chunks(scope.size(), kReductionChunk, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) out[i] = model.score(scope[i]);
    });
  });
}

EnhancementMap cem(const HyperCube& cube, const TargetSpectrum& target, ApplyMode mode) {
  check_alignment(cube, target);
  const Eigen::VectorXd t = to_eigen(target.values());
  return run_scoped(cube, mode, "cem", [&](const PixelView& scope, const std::string& context, ScopeOutput out) {
    const CemModel model(estimate(scope, MatrixKind::kRawCorrelation, Divisor::kNMinus1), t, context);
    parallel_chunks(scope.size(), kReductionChunk, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) out[i] = model.score(scope[i]);
    });
  });
}

EnhancementMap ace(const HyperCube& cube, const TargetSpectrum& target, ApplyMode mode) {
  check_alignment(cube, target);
  const Eigen::VectorXd t = to_eigen(target.values());
  return run_scoped(cube, mode, "ace", [&](const PixelView& scope, const std::string& context, ScopeOutput out) {
    const AceModel model(estimate(scope, MatrixKind::kCenteredCovariance, Divisor::kNMinus1), t, context);
    constexpr std::size_t kBlock = 256;
    parallel_chunks(scope.size(), kBlock, [&](std::size_t b, std::size_t e) {
      double scores[kBlock];
      model.score_block(scope, b, e - b, scores);
      for (std::size_t i = b; i < e; ++i) out[i] = scores[i - b];
    });
  });
}

}  // namespace methane
