#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace methane {

// H x W x p radiance cube stored band-interleaved-by-pixel: the p values of
// pixel (row, col) are contiguous at offset (row * W + col) * p.
// Single-band cubes are legal so that band subsets and exported maps share
// the same container; every filter needs at least two bands.
class HyperCube {
 public:
  HyperCube() = default;
  // Validates every invariant; throws ValidationError on violation.
  HyperCube(std::size_t height, std::size_t width, std::vector<double> wavelengths,
            std::vector<float> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t bands() const { return wavelengths_.size(); }
  std::size_t pixel_count() const { return height_ * width_; }

  const std::vector<double>& wavelengths() const { return wavelengths_; }
  std::span<const float> data() const { return data_; }

  std::span<const float> pixel(std::size_t flat_index) const {
    return {data_.data() + flat_index * bands(), bands()};
  }
  std::span<const float> pixel(std::size_t row, std::size_t col) const {
    return pixel(row * width_ + col);
  }

  bool operator==(const HyperCube&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> wavelengths_;
  std::vector<float> data_;
};

// Per-band unit absorption of the target gas, keyed by wavelength (nm).
class TargetSpectrum {
 public:
  TargetSpectrum() = default;
  // Requires matching lengths, strictly increasing wavelengths, finite values
  // and a non-zero vector.
  TargetSpectrum(std::vector<double> wavelengths, std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& wavelengths() const { return wavelengths_; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const TargetSpectrum&) const = default;

 private:
  std::vector<double> wavelengths_;
  std::vector<double> values_;
};

// H x W scalar response of one filter, row-major.
struct EnhancementMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;
  std::string product_tag;

  double at(std::size_t row, std::size_t col) const { return values[row * width + col]; }
  bool operator==(const EnhancementMap&) const = default;
};

// H x W boolean mask, row-major, one byte per pixel (0 or 1).
struct PlumeMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> values;

  PlumeMask() = default;
  PlumeMask(std::size_t h, std::size_t w) : height(h), width(w), values(h * w, 0) {}

  bool at(std::size_t row, std::size_t col) const { return values[row * width + col] != 0; }
  std::size_t count() const;
  bool operator==(const PlumeMask&) const = default;
};

// Wavelength tolerance used when matching cube bands to spectrum entries.
inline constexpr double kWavelengthTolerance = 0.5;

// Throws ValidationError unless cube and spectrum have the same band count
// and every pair of wavelengths agrees within kWavelengthTolerance.
void check_alignment(const HyperCube& cube, const TargetSpectrum& spectrum);

// Restricts the cube to the bands whose wavelengths match a spectrum entry
// and the spectrum to the entries matched by a cube band. Cube bands without
// a spectrum entry (e.g. RGB channels) are dropped. Throws ValidationError if
// fewer than two bands match.
struct AlignedInputs {
  HyperCube cube;
  TargetSpectrum spectrum;
};
AlignedInputs align(const HyperCube& cube, const TargetSpectrum& spectrum);

// Builds a cube by copying exactly the listed bands (ascending) from `cube`.
HyperCube select_cube_bands(const HyperCube& cube, std::span<const std::size_t> bands);

}  // namespace methane
