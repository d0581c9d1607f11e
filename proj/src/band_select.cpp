#include "methane/band_select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "methane/error.hpp"

namespace methane {

std::string_view to_string(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::kTopMagnitude: return "top-mag";
    case SelectionStrategy::kVarianceIncrease: return "var-inc";
    case SelectionStrategy::kEvenlySpaced: return "even";
  }
  return "";
}

SelectionStrategy parse_strategy(std::string_view name) {
  if (name == "top-mag") return SelectionStrategy::kTopMagnitude;
  if (name == "var-inc") return SelectionStrategy::kVarianceIncrease;
  if (name == "even") return SelectionStrategy::kEvenlySpaced;
  throw ValidationError("unknown band selection strategy '" + std::string(name) + "'");
}

namespace {

std::vector<std::size_t> top_magnitude(const std::vector<double>& values, std::size_t n) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  // Wavelengths are ascending, so the lower index is the lower wavelength.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(values[a]) > std::abs(values[b]); });
  order.resize(n);
  return order;
}

std::vector<std::size_t> variance_increase(const std::vector<double>& values, std::size_t n,
                                           VarianceSeed seed) {
  const std::size_t p = values.size();
  std::size_t first = 0;
  for (std::size_t i = 1; i < p; ++i) {
    const bool better = seed == VarianceSeed::kLargestMagnitude ? std::abs(values[i]) > std::abs(values[first])
                                                                : values[i] > values[first];
    if (better) first = i;
  }
  std::vector<std::size_t> chosen{first};
  std::vector<bool> taken(p, false);
  taken[first] = true;
  double sum = values[first];
  double sum_sq = values[first] * values[first];
  while (chosen.size() < n) {
    const double k = static_cast<double>(chosen.size() + 1);
    std::size_t best = p;
    double best_var = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      if (taken[i]) continue;
      const double s = sum + values[i];
      const double sq = sum_sq + values[i] * values[i];
      const double var = (sq - s * s / k) / (k - 1.0);
      // Candidates within rounding of each other count as tied, so the lower
      // wavelength wins regardless of summation order.
      const double tie = 1e-12 * sq / k;
      if (best == p || var > best_var + tie) {
        best = i;
        best_var = var;
      }
    }
    taken[best] = true;
    chosen.push_back(best);
    sum += values[best];
    sum_sq += values[best] * values[best];
  }
  return chosen;
}

std::vector<std::size_t> evenly_spaced(const std::vector<double>& wavelengths, std::size_t n,
                                       WavelengthRange range) {
  if (!(range.low < range.high)) throw ValidationError("wavelength range requires low < high");
  const bool any_inside = std::any_of(wavelengths.begin(), wavelengths.end(),
                                      [&](double w) { return w >= range.low && w <= range.high; });
  if (!any_inside) throw ValidationError("no spectrum band lies inside the requested wavelength range");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j) {
    const double target = n == 1 ? 0.5 * (range.low + range.high)
                                 : range.low + static_cast<double>(j) * (range.high - range.low) /
                                                   static_cast<double>(n - 1);
    std::size_t best = 0;
    for (std::size_t i = 1; i < wavelengths.size(); ++i) {
      if (std::abs(wavelengths[i] - target) < std::abs(wavelengths[best] - target)) best = i;
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace

BandSelection select_bands(const TargetSpectrum& spectrum, SelectionStrategy strategy, std::size_t n,
                           WavelengthRange range, VarianceSeed seed) {
  if (n == 0) throw ValidationError("number of bands must be at least 1");
  const std::size_t p = spectrum.size();
  if (strategy != SelectionStrategy::kEvenlySpaced && n > p) {
    throw ValidationError("requested " + std::to_string(n) + " bands but the spectrum has only " +
                          std::to_string(p));
  }
  BandSelection sel;
  sel.strategy = strategy;
  sel.n_requested = n;
  switch (strategy) {
    case SelectionStrategy::kTopMagnitude: sel.indices = top_magnitude(spectrum.values(), n); break;
    case SelectionStrategy::kVarianceIncrease: sel.indices = variance_increase(spectrum.values(), n, seed); break;
    case SelectionStrategy::kEvenlySpaced: sel.indices = evenly_spaced(spectrum.wavelengths(), n, range); break;
  }
  std::sort(sel.indices.begin(), sel.indices.end());
  sel.indices.erase(std::unique(sel.indices.begin(), sel.indices.end()), sel.indices.end());
  return sel;
}

TargetSpectrum subset(const TargetSpectrum& spectrum, const std::vector<std::size_t>& indices) {
  std::vector<double> wl;
  std::vector<double> values;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t b = indices[i];
    if (b >= spectrum.size()) throw ValidationError("band index out of range");
    if (i > 0 && b <= indices[i - 1]) throw ValidationError("band indices must be ascending and unique");
    wl.push_back(spectrum.wavelengths()[b]);
    values.push_back(spectrum.values()[b]);
  }
  if (wl.empty()) throw ValidationError("band selection is empty");
  return TargetSpectrum(std::move(wl), std::move(values));
}

std::pair<HyperCube, TargetSpectrum> subset(const HyperCube& cube, const TargetSpectrum& spectrum,
                                            const BandSelection& selection) {
  check_alignment(cube, spectrum);
  return {select_cube_bands(cube, selection.indices), subset(spectrum, selection.indices)};
}

}  // namespace methane
