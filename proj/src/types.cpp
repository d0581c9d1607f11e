#include "methane/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "methane/error.hpp"

namespace methane {
namespace {

bool strictly_increasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(),
                            [](double a, double b) { return !(a < b); }) == v.end();
}

}  // namespace

HyperCube::HyperCube(std::size_t height, std::size_t width, std::vector<double> wavelengths,
                     std::vector<float> data)
    : height_(height), width_(width), wavelengths_(std::move(wavelengths)), data_(std::move(data)) {
  if (height_ < 1 || width_ < 1) throw ValidationError("cube must have at least one pixel");
  if (wavelengths_.empty()) throw ValidationError("cube must have at least one band");
  if (!std::all_of(wavelengths_.begin(), wavelengths_.end(), [](double w) { return std::isfinite(w); }) ||
      !strictly_increasing(wavelengths_)) {
    throw ValidationError("cube wavelengths must be finite and strictly increasing");
  }
  const std::size_t expected = height_ * width_ * wavelengths_.size();
  if (data_.size() != expected) {
    std::ostringstream os;
    os << "cube data holds " << data_.size() << " values, expected " << expected;
    throw SizeMismatchError(os.str());
  }
  const auto bad = std::find_if(data_.begin(), data_.end(), [](float v) { return !std::isfinite(v); });
  if (bad != data_.end()) {
    std::ostringstream os;
    os << "cube value at index " << (bad - data_.begin()) << " is not finite";
    throw ValidationError(os.str());
  }
}

TargetSpectrum::TargetSpectrum(std::vector<double> wavelengths, std::vector<double> values)
    : wavelengths_(std::move(wavelengths)), values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("spectrum is empty");
  if (wavelengths_.size() != values_.size()) {
    throw ValidationError("spectrum wavelengths and values differ in length");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(wavelengths_.begin(), wavelengths_.end(), finite) ||
      !std::all_of(values_.begin(), values_.end(), finite)) {
    throw ValidationError("spectrum contains non-finite entries");
  }
  if (!strictly_increasing(wavelengths_)) {
    throw ValidationError("spectrum wavelengths must be strictly increasing (duplicates are not allowed)");
  }
  if (std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; })) {
    throw ValidationError("spectrum is the zero vector");
  }
}

std::size_t PlumeMask::count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](auto v) { return v != 0; }));
}

void check_alignment(const HyperCube& cube, const TargetSpectrum& spectrum) {
  if (cube.bands() != spectrum.size()) {
    std::ostringstream os;
    os << "cube has " << cube.bands() << " bands but spectrum has " << spectrum.size();
    throw ValidationError(os.str());
  }
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    if (std::abs(cube.wavelengths()[b] - spectrum.wavelengths()[b]) > kWavelengthTolerance) {
      std::ostringstream os;
      os << "band " << b << ": cube wavelength " << cube.wavelengths()[b] << " nm does not match spectrum "
         << spectrum.wavelengths()[b] << " nm";
      throw ValidationError(os.str());
    }
  }
}

AlignedInputs align(const HyperCube& cube, const TargetSpectrum& spectrum) {
  const auto& sw = spectrum.wavelengths();
  std::vector<std::size_t> cube_bands;
  std::vector<double> wl;
  std::vector<double> values;
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    const double w = cube.wavelengths()[b];
    auto it = std::lower_bound(sw.begin(), sw.end(), w);
    std::size_t best = sw.size();
    double best_gap = kWavelengthTolerance;
    for (auto cand : {it, it == sw.begin() ? sw.end() : it - 1}) {
      if (cand == sw.end()) continue;
      const double gap = std::abs(*cand - w);
      if (gap <= best_gap) {
        best_gap = gap;
        best = static_cast<std::size_t>(cand - sw.begin());
      }
    }
    if (best == sw.size()) continue;
    if (!wl.empty() && spectrum.wavelengths()[best] <= wl.back()) continue;
    cube_bands.push_back(b);
    wl.push_back(spectrum.wavelengths()[best]);
    values.push_back(spectrum.values()[best]);
  }
  if (cube_bands.size() < 2) {
    throw ValidationError("fewer than two cube bands match the spectrum wavelengths");
  }
  return {select_cube_bands(cube, cube_bands), TargetSpectrum(std::move(wl), std::move(values))};
}

HyperCube select_cube_bands(const HyperCube& cube, std::span<const std::size_t> bands) {
  if (bands.empty()) throw ValidationError("band selection is empty");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (bands[i] >= cube.bands()) throw ValidationError("band index out of range");
    if (i > 0 && bands[i] <= bands[i - 1]) throw ValidationError("band indices must be ascending and unique");
  }
  const std::size_t p = cube.bands();
  const std::size_t q = bands.size();
  std::vector<double> wl(q);
  for (std::size_t j = 0; j < q; ++j) wl[j] = cube.wavelengths()[bands[j]];
  std::vector<float> out(cube.pixel_count() * q);
  const auto src = cube.data();
  for (std::size_t i = 0; i < cube.pixel_count(); ++i) {
    const float* px = src.data() + i * p;
    float* dst = out.data() + i * q;
    for (std::size_t j = 0; j < q; ++j) dst[j] = px[bands[j]];
  }
  return HyperCube(cube.height(), cube.width(), std::move(wl), std::move(out));
}

}  // namespace methane
