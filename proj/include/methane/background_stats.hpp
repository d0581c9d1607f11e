#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "methane/types.hpp"

namespace methane {

// Non-owning view of `count` pixel vectors of `bands` floats each; pixel i
// starts at base + i * stride. Covers whole tiles, single sensor columns of a
// BIP cube and gathered sample buffers alike.
class PixelView {
 public:
  PixelView(const float* base, std::size_t count, std::size_t bands, std::size_t stride)
      : base_(base), count_(count), bands_(bands), stride_(stride) {}

  static PixelView tile(const HyperCube& cube) {
    return {cube.data().data(), cube.pixel_count(), cube.bands(), cube.bands()};
  }
  static PixelView column(const HyperCube& cube, std::size_t col) {
    return {cube.data().data() + col * cube.bands(), cube.height(), cube.bands(), cube.width() * cube.bands()};
  }
  // Contiguous rows of `bands` values.
  static PixelView rows(std::span<const float> data, std::size_t bands) {
    return {data.data(), data.size() / bands, bands, bands};
  }

  std::size_t size() const { return count_; }
  std::size_t bands() const { return bands_; }
  const float* operator[](std::size_t i) const { return base_ + i * stride_; }
  Eigen::Map<const Eigen::VectorXf> vec(std::size_t i) const {
    return {(*this)[i], static_cast<Eigen::Index>(bands_)};
  }

 private:
  const float* base_;
  std::size_t count_;
  std::size_t bands_;
  std::size_t stride_;
};

enum class MatrixKind { kCenteredCovariance, kRawCorrelation };
enum class Divisor { kN, kNMinus1 };

struct BackgroundStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd matrix;
  MatrixKind kind = MatrixKind::kCenteredCovariance;
  Divisor divisor = Divisor::kNMinus1;
  std::size_t sample_count = 0;
};

// Band means and either the centered covariance sum (x-mu)(x-mu)^T or the raw
// correlation sum x x^T, divided by N or N-1. Accumulates in double with a
// fixed chunked reduction; the returned matrix is exactly symmetric.
BackgroundStats estimate(const PixelView& pixels, MatrixKind kind, Divisor divisor);

// Pixels per reduction chunk in estimate() and the other per-pixel reductions.
inline constexpr std::size_t kReductionChunk = 2048;

// Cholesky factor of a symmetric positive definite matrix. If the plain
// factorization fails (non-positive pivot or reciprocal condition below
// kMinRcond), lambda * I is added with lambda = 1e-10 * trace / p, growing
// tenfold up to 1e-2 * trace / p. Each applied jitter is logged.
class SpdFactor {
 public:
  static constexpr double kMinRcond = 1e-13;

  // `context` names the product and scope in log messages and errors.
  explicit SpdFactor(const Eigen::MatrixXd& matrix, std::string_view context = "background");

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return llt_.solve(rhs); }
  // L^{-1} v, so that v^T M^{-1} v = |whiten(v)|^2.
  Eigen::VectorXd whiten(const Eigen::VectorXd& v) const {
    return llt_.matrixL().solve(v);
  }
  template <class Derived>
  void whiten_in_place(Eigen::MatrixBase<Derived>& v) const {
    llt_.matrixL().solveInPlace(v);
  }
  double jitter() const { return jitter_; }
  Eigen::Index size() const { return llt_.rows(); }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double jitter_ = 0.0;
};

Eigen::VectorXd spd_solve(const BackgroundStats& stats, const Eigen::VectorXd& rhs,
                          std::string_view context = "background");

Eigen::VectorXd to_eigen(const std::vector<double>& v);

}  // namespace methane
