#include "methane/background_stats.hpp"

#include <cmath>
#include <sstream>

#include "methane/error.hpp"
#include "methane/log.hpp"
#include "methane/parallel.hpp"

namespace methane {
namespace {

struct Moments {
  Eigen::VectorXd sum;
  Eigen::MatrixXd outer;  // lower triangle only
};

Eigen::VectorXd band_sums(const PixelView& pixels, std::size_t begin, std::size_t end) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pixels.bands()));
  for (std::size_t i = begin; i < end; ++i) sum += pixels.vec(i).cast<double>();
  return sum;
}

void check_finite(const PixelView& pixels) {
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (!pixels.vec(i).allFinite()) throw ValidationError("background pixel " + std::to_string(i) + " is not finite");
  }
}

}  // namespace

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

BackgroundStats estimate(const PixelView& pixels, MatrixKind kind, Divisor divisor) {
  const std::size_t n = pixels.size();
  if (n < 2) throw ValidationError("background estimation needs at least 2 pixels, got " + std::to_string(n));
  check_finite(pixels);
  const auto p = static_cast<Eigen::Index>(pixels.bands());

  BackgroundStats stats;
  stats.kind = kind;
  stats.divisor = divisor;
  stats.sample_count = n;

  auto combine = [](Moments& a, Moments& b) {
    a.sum += b.sum;
    a.outer += b.outer;
  };

  Eigen::VectorXd mean;
  Eigen::MatrixXd outer;
  if (kind == MatrixKind::kRawCorrelation) {
    // One pass: sum and x x^T together.
    auto m = reduce_chunks<Moments>(
        n, kReductionChunk,
        [&](std::size_t begin, std::size_t end) {
          Eigen::MatrixXd block(p, static_cast<Eigen::Index>(end - begin));
          for (std::size_t i = begin; i < end; ++i) block.col(static_cast<Eigen::Index>(i - begin)) = pixels.vec(i).cast<double>();
          Moments part{block.rowwise().sum(), Eigen::MatrixXd::Zero(p, p)};
          part.outer.selfadjointView<Eigen::Lower>().rankUpdate(block);
          return part;
        },
        combine);
    mean = m.sum / static_cast<double>(n);
    outer = std::move(m.outer);
  } else {
    const auto sum = reduce_chunks<Eigen::VectorXd>(
        n, kReductionChunk, [&](std::size_t b, std::size_t e) { return band_sums(pixels, b, e); },
        [](Eigen::VectorXd& a, Eigen::VectorXd& b) { a += b; });
    mean = sum / static_cast<double>(n);
    outer = reduce_chunks<Eigen::MatrixXd>(
        n, kReductionChunk,
        [&](std::size_t begin, std::size_t end) {
          Eigen::MatrixXd block(p, static_cast<Eigen::Index>(end - begin));
          for (std::size_t i = begin; i < end; ++i) {
            block.col(static_cast<Eigen::Index>(i - begin)) = pixels.vec(i).cast<double>() - mean;
          }
          Eigen::MatrixXd part = Eigen::MatrixXd::Zero(p, p);
          part.selfadjointView<Eigen::Lower>().rankUpdate(block);
          return part;
        },
        [](Eigen::MatrixXd& a, Eigen::MatrixXd& b) { a += b; });
  }
  const double denom = static_cast<double>(divisor == Divisor::kN ? n : n - 1);
  stats.mean = std::move(mean);
  stats.matrix = Eigen::MatrixXd(outer.selfadjointView<Eigen::Lower>()) / denom;
  return stats;
}

SpdFactor::SpdFactor(const Eigen::MatrixXd& matrix, std::string_view context) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) throw ValidationError("matrix must be square and non-empty");
  auto accept = [&](const Eigen::MatrixXd& m) {
    llt_.compute(m);
    return llt_.info() == Eigen::Success && std::isfinite(llt_.rcond()) && llt_.rcond() >= kMinRcond;
  };
  if (matrix.allFinite() && accept(matrix)) return;

  const double p = static_cast<double>(matrix.rows());
  const double scale = matrix.allFinite() ? matrix.trace() / p : 0.0;
  if (scale > 0.0 && std::isfinite(scale)) {
    for (double rel = 1e-10; rel <= 1e-2 * (1.0 + 1e-9); rel *= 10.0) {
      const double lambda = rel * scale;
      Eigen::MatrixXd jittered = matrix;
      jittered.diagonal().array() += lambda;
      if (accept(jittered)) {
        jitter_ = lambda;
        std::ostringstream os;
        os << context << ": covariance not positive definite, regularized with jitter " << lambda;
        log::info(os.str());
        return;
      }
    }
  }
  throw SingularBackgroundError(std::string(context) + ": background matrix is singular even with maximal jitter");
}

Eigen::VectorXd spd_solve(const BackgroundStats& stats, const Eigen::VectorXd& rhs, std::string_view context) {
  if (rhs.size() != stats.matrix.rows()) throw ValidationError("right-hand side length does not match the matrix");
  return SpdFactor(stats.matrix, context).solve(rhs);
}

}  // namespace methane
