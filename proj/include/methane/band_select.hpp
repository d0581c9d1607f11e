#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "methane/types.hpp"

namespace methane {

enum class SelectionStrategy { kTopMagnitude, kVarianceIncrease, kEvenlySpaced };

// CLI names: top-mag, var-inc, even.
std::string_view to_string(SelectionStrategy s);
SelectionStrategy parse_strategy(std::string_view name);

struct WavelengthRange {
  double low = 2100.0;
  double high = 2500.0;
};

struct BandSelection {
  std::vector<std::size_t> indices;  // ascending, unique
  SelectionStrategy strategy = SelectionStrategy::kTopMagnitude;
  std::size_t n_requested = 0;
};

// Seed used by the variance-increase strategy.
enum class VarianceSeed { kLargestMagnitude, kLargestValue };

// Chooses `n` bands of `spectrum`.
//  top-mag: the n largest |value|, ties to the lower wavelength.
//  var-inc: greedy from the seed band, each step adding the band that
//           maximises the sample variance (divisor k-1) of the chosen values.
//  even:    n wavelengths evenly spaced over `range`, each snapped to the
//           nearest band; collisions collapse, so fewer than n may return.
BandSelection select_bands(const TargetSpectrum& spectrum, SelectionStrategy strategy, std::size_t n,
                           WavelengthRange range = {},
                           VarianceSeed seed = VarianceSeed::kLargestMagnitude);

// Applies a selection made on an aligned spectrum to both inputs.
std::pair<HyperCube, TargetSpectrum> subset(const HyperCube& cube, const TargetSpectrum& spectrum,
                                            const BandSelection& selection);

TargetSpectrum subset(const TargetSpectrum& spectrum, const std::vector<std::size_t>& indices);

}  // namespace methane
