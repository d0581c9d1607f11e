#pragma once

#include <cstddef>

#include "methane/types.hpp"

namespace methane {

struct MorphConfig {
  double threshold = 0.0;  // in map units; strictly greater is set
  std::size_t kernel = 3;  // odd side of the square structuring element
  std::size_t erode_iters = 1;
  std::size_t dilate_iters = 1;

  void validate() const;
};

PlumeMask threshold_map(const EnhancementMap& map, double threshold);

// Square-kernel binary morphology. Pixels outside the image count as unset,
// so erosion clears a border of kernel/2 pixels and dilation never grows
// from outside.
PlumeMask erode(const PlumeMask& mask, std::size_t kernel);
PlumeMask dilate(const PlumeMask& mask, std::size_t kernel);

// threshold, then erode_iters erosions, then dilate_iters dilations.
PlumeMask morphological_baseline(const EnhancementMap& map, const MorphConfig& config);

}  // namespace methane
