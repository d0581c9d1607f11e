#include "methane/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "methane/error.hpp"

namespace methane {

void MorphConfig::validate() const {
  if (kernel == 0 || kernel % 2 == 0) {
    throw ValidationError("structuring element side must be odd and positive, got " + std::to_string(kernel));
  }
  if (!std::isfinite(threshold)) throw ValidationError("threshold must be finite");
}

PlumeMask threshold_map(const EnhancementMap& map, double threshold) {
  PlumeMask mask(map.height, map.width);
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    if (!std::isfinite(map.values[i])) throw ValidationError("map contains non-finite values");
    mask.values[i] = map.values[i] > threshold ? 1 : 0;
  }
  return mask;
}

namespace {

// Separable pass along one axis: out(i) = all/any of in over the window
// [i - half, i + half]; cells outside [0, len) count as unset.
void line_pass(const std::uint8_t* in, std::uint8_t* out, std::size_t len, std::size_t step, std::size_t half,
               bool erode) {
  const long n = static_cast<long>(len);
  const long h = static_cast<long>(half);
  long set = 0;
  // Running count of set cells in the window centred on i.
  for (long j = 0; j <= std::min(h, n - 1); ++j) set += in[j * step];
  for (long i = 0; i < n; ++i) {
    const long lo = i - h;
    const long hi = i + h;
    const long inside = std::min(hi, n - 1) - std::max(lo, 0L) + 1;
    if (erode) {
      out[i * step] = (lo >= 0 && hi < n && set == inside) ? 1 : 0;
    } else {
      out[i * step] = set > 0 ? 1 : 0;
    }
    if (lo >= 0) set -= in[lo * step];
    if (hi + 1 < n) set += in[(hi + 1) * step];
  }
}

PlumeMask apply(const PlumeMask& mask, std::size_t kernel, bool erode) {
  if (kernel == 0 || kernel % 2 == 0) throw ValidationError("structuring element side must be odd and positive");
  const std::size_t half = kernel / 2;
  PlumeMask rows(mask.height, mask.width);
  for (std::size_t r = 0; r < mask.height; ++r) {
    line_pass(mask.values.data() + r * mask.width, rows.values.data() + r * mask.width, mask.width, 1, half, erode);
  }
  PlumeMask out(mask.height, mask.width);
  for (std::size_t c = 0; c < mask.width; ++c) {
    line_pass(rows.values.data() + c, out.values.data() + c, mask.height, mask.width, half, erode);
  }
  return out;
}

}  // namespace

PlumeMask erode(const PlumeMask& mask, std::size_t kernel) { return apply(mask, kernel, true); }
PlumeMask dilate(const PlumeMask& mask, std::size_t kernel) { return apply(mask, kernel, false); }

PlumeMask morphological_baseline(const EnhancementMap& map, const MorphConfig& config) {
  config.validate();
  PlumeMask mask = threshold_map(map, config.threshold);
  for (std::size_t i = 0; i < config.erode_iters; ++i) mask = erode(mask, config.kernel);
  for (std::size_t i = 0; i < config.dilate_iters; ++i) mask = dilate(mask, config.kernel);
  return mask;
}

}  // namespace methane
