#include "methane/mag1c.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "methane/error.hpp"
#include "methane/log.hpp"
#include "methane/parallel.hpp"

namespace methane {

void Mag1cConfig::validate() const {
  if (n_iter < 1) throw ValidationError("mag1c needs at least one iteration");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("mag1c epsilon must be positive");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("sample fraction must lie in (0, 1]");
}

namespace {

double dot(const float* x, const Eigen::VectorXd& w) {
  double acc = 0.0;
  for (Eigen::Index b = 0; b < w.size(); ++b) acc += static_cast<double>(x[b]) * w[b];
  return acc;
}

// Per-chunk sums gathered while updating alpha: beta_i = r_i alpha_i.
struct BetaMoments {
  double alpha_sum = 0.0;
  double beta_sum = 0.0;
  double beta_sq = 0.0;
  Eigen::VectorXd weighted;  // sum beta_i x_i
  bool finite = true;

  void merge(const BetaMoments& o) {
    alpha_sum += o.alpha_sum;
    beta_sum += o.beta_sum;
    beta_sq += o.beta_sq;
    weighted += o.weighted;
    finite = finite && o.finite;
  }
};

// One pass over the scope: alpha_i <- update(i, alpha_i), then accumulate the
// beta moments of the new alpha.
template <class Update>
BetaMoments update_alpha(const PixelView& pixels, const std::vector<double>& r, std::vector<double>& alpha,
                         Update&& update) {
  const auto p = static_cast<Eigen::Index>(pixels.bands());
  return reduce_chunks<BetaMoments>(
      pixels.size(), kReductionChunk,
      [&](std::size_t begin, std::size_t end) {
        BetaMoments part;
        part.weighted = Eigen::VectorXd::Zero(p);
        for (std::size_t i = begin; i < end; ++i) {
          const double a = update(i, alpha[i]);
          alpha[i] = a;
          const double beta = r[i] * a;
          part.finite = part.finite && std::isfinite(a);
          part.alpha_sum += a;
          part.beta_sum += beta;
          part.beta_sq += beta * beta;
          if (beta != 0.0) part.weighted += beta * pixels.vec(i).cast<double>();
        }
        return part;
      },
      [](BetaMoments& a, BetaMoments& b) { a.merge(b); });
}

void require_finite(bool ok, std::string_view context, std::size_t iteration) {
  if (!ok) {
    throw NumericalError(std::string(context) + ": non-finite values at iteration " + std::to_string(iteration));
  }
}

}  // namespace

AlbedoWeights albedo_weights(const PixelView& pixels, const Eigen::VectorXd& mu) {
  const double norm = mu.squaredNorm();
  if (!(norm > 0.0)) throw ValidationError("albedo correction needs a non-zero mean spectrum");
  AlbedoWeights w;
  w.r.resize(pixels.size());
  const Eigen::VectorXd scaled = mu / norm;
  parallel_chunks(pixels.size(), kReductionChunk, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) w.r[i] = dot(pixels[i], scaled);
  });
  return w;
}

void clamp_albedo(AlbedoWeights& weights, std::string_view context) {
  std::size_t clamped = 0;
  for (double& r : weights.r) {
    if (!(r > 0.0)) {
      r = kMinAlbedo;
      ++clamped;
    }
  }
  if (clamped > 0) {
    std::ostringstream os;
    os << context << ": " << clamped << " pixel(s) with non-positive albedo clamped to " << kMinAlbedo;
    log::warn(os.str());
  }
}

ScopeResult albedo_reweight_l1_filter(const PixelView& pixels, const Eigen::VectorXd& target,
                                      const Mag1cConfig& config, std::string_view context) {
  config.validate();
  if (target.size() != static_cast<Eigen::Index>(pixels.bands())) {
    throw ValidationError("target length does not match the pixel band count");
  }
  const std::size_t n = pixels.size();
  const double count = static_cast<double>(n);

  const BackgroundStats initial = estimate(pixels, MatrixKind::kCenteredCovariance, Divisor::kN);
  const Eigen::VectorXd& mu0 = initial.mean;
  const Eigen::MatrixXd& cov0 = initial.matrix;

  AlbedoWeights albedo = albedo_weights(pixels, mu0);
  clamp_albedo(albedo, context);
  const std::vector<double>& r = albedo.r;

  ScopeResult out;
  out.alpha.assign(n, 0.0);
  out.mean_alpha.reserve(config.n_iter);

  // alpha^0: plain albedo-normalised filter, no sparsity and no ReLU.
  Eigen::VectorXd signal = mu0.cwiseProduct(target);
  Eigen::VectorXd weights = SpdFactor(cov0, std::string(context) + " iteration 0").solve(signal);
  double m = signal.dot(weights);
  double offset = mu0.dot(weights);
  BetaMoments moments = update_alpha(pixels, r, out.alpha, [&](std::size_t i, double) {
    return (dot(pixels[i], weights) - offset) / (r[i] * m);
  });
  require_finite(moments.finite && std::isfinite(m), context, 0);

  Eigen::VectorXd mu = mu0;
  Eigen::MatrixXd cov = cov0;
  const double eps = config.epsilon;
  for (std::size_t k = 1; k <= config.n_iter; ++k) {
    // mu^k = mean_i(x_i - beta_i mu^{k-1} .* s)
    const Eigen::VectorXd mu_next = mu0 - (moments.beta_sum / count) * mu.cwiseProduct(target);
    signal = mu_next.cwiseProduct(target);
    // C^k = mean_i d_i d_i^T with d_i = x_i - beta_i signal - mu^k, expanded
    // around C^0 so that only O(N p) work is needed per iteration.
    const Eigen::VectorXd shift = mu0 - mu_next;
    const Eigen::VectorXd g = moments.weighted - moments.beta_sum * mu_next;
    cov = cov0;
    cov.noalias() += shift * shift.transpose();
    cov.noalias() -= (g * signal.transpose() + signal * g.transpose()) / count;
    cov.noalias() += (moments.beta_sq / count) * (signal * signal.transpose());
    mu = mu_next;

    const SpdFactor factor(cov, std::string(context) + " iteration " + std::to_string(k));
    weights = factor.solve(signal);
    const double m_raw = signal.dot(weights);
    m = std::max(m_raw, 1.0);
    offset = mu.dot(weights);
    require_finite(std::isfinite(m_raw), context, k);

    moments = update_alpha(pixels, r, out.alpha, [&](std::size_t i, double previous) {
      const double w = 1.0 / (r[i] * (previous + eps));
      return std::max((dot(pixels[i], weights) - offset - w) / (r[i] * m), 0.0);
    });
    require_finite(moments.finite, context, k);
    out.mean_alpha.push_back(moments.alpha_sum / count);
    if (k == config.n_iter) out.m = m_raw;
  }
  out.mu = std::move(mu);
  out.covariance = std::move(cov);
  out.t_vec = std::move(weights);
  return out;
}

EnhancementMap mag1c(const HyperCube& cube, const TargetSpectrum& target, const Mag1cConfig& config) {
  config.validate();
  check_alignment(cube, target);
  const Eigen::VectorXd s = to_eigen(target.values());
  EnhancementMap map{cube.height(), cube.width(), std::vector<double>(cube.pixel_count()), "mag1c"};
  if (config.mode == ApplyMode::kTile) {
    map.values = albedo_reweight_l1_filter(PixelView::tile(cube), s, config, "mag1c tile").alpha;
    return map;
  }
  if (cube.height() < 2) throw ValidationError("column mode needs at least 2 rows per column");
  const std::size_t w = cube.width();
  parallel_chunks(w, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t col = begin; col < end; ++col) {
      const auto result =
          albedo_reweight_l1_filter(PixelView::column(cube, col), s, config, "mag1c column " + std::to_string(col));
      for (std::size_t row = 0; row < cube.height(); ++row) map.values[row * w + col] = result.alpha[row];
    }
  });
  return map;
}

std::vector<std::size_t> sample_indices(std::size_t pixel_count, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("sample fraction must lie in (0, 1]");
  // The small offset keeps products such as 10 * 0.3 from rounding below an
  // integer.
  const auto floored = static_cast<std::size_t>(std::floor(static_cast<double>(pixel_count) * fraction + 1e-9));
  const std::size_t k = std::max<std::size_t>(2, std::min(floored, pixel_count));
  if (k > pixel_count) {
    throw ValidationError("sample of " + std::to_string(k) + " pixels exceeds the " + std::to_string(pixel_count) +
                          " available");
  }
  std::vector<std::size_t> idx(k);
  for (std::size_t j = 0; j < k; ++j) idx[j] = j * pixel_count / k;
  return idx;
}

std::vector<float> sample_uniform(const HyperCube& cube, double fraction) {
  const auto idx = sample_indices(cube.pixel_count(), fraction);
  const std::size_t p = cube.bands();
  std::vector<float> out(idx.size() * p);
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto px = cube.pixel(idx[j]);
    std::copy(px.begin(), px.end(), out.begin() + static_cast<std::ptrdiff_t>(j * p));
  }
  return out;
}

Mag1cParams compute_parameters(const PixelView& sample, const Eigen::VectorXd& target, const Mag1cConfig& config) {
  if (sample.size() < 2) throw ValidationError("Mag1c-SAS sample must contain at least 2 pixels");
  auto result = albedo_reweight_l1_filter(sample, target, config, "mag1c-sas parameters");
  return {std::move(result.mu), std::move(result.t_vec), result.m};
}

std::vector<double> lightweight_filter(const PixelView& pixels, const Mag1cParams& params, const Mag1cConfig& config,
                                       LightweightOptions options) {
  config.validate();
  AlbedoWeights albedo = albedo_weights(pixels, params.mu);
  clamp_albedo(albedo, "mag1c-sas filter");
  const std::vector<double>& r = albedo.r;
  const double m = std::max(params.m, 1.0);
  const double offset = params.mu.dot(params.t_vec);
  const double eps = config.epsilon;
  std::vector<double> alpha(pixels.size());

  // Blocks stay cache resident across the sparsity iterations, and the inner
  // loops over pixels vectorise.
  constexpr std::size_t kBlock = 512;
  parallel_chunks(pixels.size(), kBlock, [&](std::size_t begin, std::size_t end) {
    double base[kBlock];
    double norm[kBlock];
    const std::size_t len = end - begin;
    for (std::size_t j = 0; j < len; ++j) {
      const std::size_t i = begin + j;
      norm[j] = r[i] * m;
      base[j] = (dot(pixels[i], params.t_vec) - offset) / norm[j];
    }
    double* a = alpha.data() + begin;
    std::copy(base, base + len, a);
    for (std::size_t k = 1; k <= config.n_iter; ++k) {
      for (std::size_t j = 0; j < len; ++j) {
        const double w = options.sparsity ? 1.0 / (r[begin + j] * (a[j] + eps)) : 0.0;
        const double next = base[j] - w / norm[j];
        a[j] = options.relu ? std::max(next, 0.0) : next;
      }
    }
  });
  return alpha;
}

EnhancementMap mag1c_sas(const HyperCube& cube, const TargetSpectrum& target, const Mag1cConfig& config) {
  config.validate();
  check_alignment(cube, target);
  const Eigen::VectorXd s = to_eigen(target.values());
  const auto sample = sample_uniform(cube, config.fraction);
  const Mag1cParams params = compute_parameters(PixelView::rows(sample, cube.bands()), s, config);
  EnhancementMap map{cube.height(), cube.width(), lightweight_filter(PixelView::tile(cube), params, config),
                     "mag1c-sas"};
  if (!std::all_of(map.values.begin(), map.values.end(), [](double v) { return std::isfinite(v); })) {
    throw NumericalError("mag1c-sas: non-finite values in the lightweight filter");
  }
  return map;
}

}  // namespace methane
