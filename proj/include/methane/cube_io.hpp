#pragma once

#include <filesystem>

#include "methane/types.hpp"

namespace methane {

// Cube container: `<stem>.bin` holds raw little-endian f32 values in BIP
// order, `<stem>.json` holds exactly the keys height, width, bands,
// wavelengths, dtype ("f32le") and layout ("bip").
//
// `path` may name either file or the bare stem; the extension is replaced.
HyperCube read_cube(const std::filesystem::path& path);
void write_cube(const HyperCube& cube, const std::filesystem::path& path);

// CSV with header `wavelength_nm,value`. Rows are sorted ascending by
// wavelength on load.
TargetSpectrum load_spectrum(const std::filesystem::path& path);
void write_spectrum(const TargetSpectrum& spectrum, const std::filesystem::path& path);

// Maps and masks travel as single-band cube containers. The band wavelength
// is a placeholder (0 nm) since the product has no spectral axis.
void write_map(const EnhancementMap& map, const std::filesystem::path& path);
EnhancementMap read_map(const std::filesystem::path& path);
void write_mask(const PlumeMask& mask, const std::filesystem::path& path);
// Any value > 0.5 is set.
PlumeMask read_mask(const std::filesystem::path& path);

// 8-bit binary PGM scaled linearly between the map's min and max.
void write_pgm(const EnhancementMap& map, const std::filesystem::path& path);

std::filesystem::path header_path(const std::filesystem::path& path);
std::filesystem::path payload_path(const std::filesystem::path& path);

}  // namespace methane
