#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "methane/detectors.hpp"
#include "methane/mag1c.hpp"
#include "methane/types.hpp"

namespace methane {

enum class Product { kMatchedFilter, kCem, kAce, kMag1c, kMag1cSas };

// CLI names: mf, cem, ace, mag1c, mag1c-sas.
std::string_view to_string(Product product);
// Throws UsageError for unknown names.
Product parse_product(std::string_view name);
const std::vector<std::string>& product_names();

struct ProductSpec {
  Product product = Product::kMatchedFilter;
  ApplyMode mode = ApplyMode::kTile;  // classical detectors and mag1c
  Mag1cConfig mag1c;                  // mag1c and mag1c-sas
};

// Default spec for a product: tile mode for classical detectors, column for
// mag1c.
ProductSpec default_spec(Product product);

std::string label(const ProductSpec& spec);  // e.g. "mag1c --mode tile"

EnhancementMap run_product(const ProductSpec& spec, const HyperCube& cube, const TargetSpectrum& spectrum);

// Per-product thresholds from an INI file with one section per product:
//   [mf]
//   threshold = 0.5
class ThresholdTable {
 public:
  ThresholdTable() = default;
  static ThresholdTable load(const std::filesystem::path& path);

  std::optional<double> find(std::string_view product) const;
  // Throws ValidationError naming the file when the product has no entry.
  double at(std::string_view product) const;
  void set(std::string_view product, double value) { values_[std::string(product)] = value; }
  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::filesystem::path source_;
  std::map<std::string, double> values_;
};

double median(std::vector<double> values);

struct BenchReport {
  std::string product;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t bands = 0;
  std::string config_json;  // echo of the ProductSpec and harness settings
  std::vector<double> run_seconds;
  double median_seconds = 0.0;
  std::uint64_t working_set_bytes = 0;  // computed estimate
  std::uint64_t max_rss_bytes = 0;      // process high-water mark after the runs
};

std::string to_json(const BenchReport& report);

// Bytes the product needs beyond its input cube: output map, statistics and
// per-thread scratch.
std::uint64_t working_set_estimate(const ProductSpec& spec, std::size_t height, std::size_t width, std::size_t bands);
std::uint64_t process_max_rss_bytes();

struct BenchOptions {
  std::size_t runs = 5;
  std::size_t warmup = 1;
};

// Untimed warm-up runs, then `runs` timed calls of `body`.
std::vector<double> time_runs(const std::function<void()>& body, const BenchOptions& options);

BenchReport bench_product(const ProductSpec& spec, const HyperCube& cube, const TargetSpectrum& spectrum,
                          const BenchOptions& options);

std::string to_json(const ProductSpec& spec);

}  // namespace methane
