#include "methane/bench.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"
#include "methane/error.hpp"
#include "methane/parallel.hpp"

namespace methane {
namespace {

struct ProductName {
  Product product;
  const char* name;
};

constexpr ProductName kProductNames[] = {
    {Product::kMatchedFilter, "mf"}, {Product::kCem, "cem"},           {Product::kAce, "ace"},
    {Product::kMag1c, "mag1c"},      {Product::kMag1cSas, "mag1c-sas"},
};

nlohmann::json spec_json(const ProductSpec& spec) {
  nlohmann::json j = {{"product", to_string(spec.product)}};
  if (spec.product != Product::kMag1cSas) j["mode"] = to_string(spec.mode);
  if (spec.product == Product::kMag1c || spec.product == Product::kMag1cSas) {
    j["n_iter"] = spec.mag1c.n_iter;
    j["epsilon"] = spec.mag1c.epsilon;
  }
  if (spec.product == Product::kMag1cSas) j["fraction"] = spec.mag1c.fraction;
  return j;
}

}  // namespace

std::string_view to_string(Product product) {
  for (const auto& entry : kProductNames) {
    if (entry.product == product) return entry.name;
  }
  return "unknown";
}

Product parse_product(std::string_view name) {
  for (const auto& entry : kProductNames) {
    if (name == entry.name) return entry.product;
  }
  throw UsageError("unknown product '" + std::string(name) + "' (expected mf, cem, ace, mag1c or mag1c-sas)");
}

const std::vector<std::string>& product_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& entry : kProductNames) v.emplace_back(entry.name);
    return v;
  }();
  return names;
}

ProductSpec default_spec(Product product) {
  ProductSpec spec;
  spec.product = product;
  spec.mode = product == Product::kMag1c ? ApplyMode::kColumn : ApplyMode::kTile;
  spec.mag1c.mode = spec.mode;
  return spec;
}

std::string label(const ProductSpec& spec) {
  std::string s(to_string(spec.product));
  if (spec.product != Product::kMag1cSas) s += " --mode " + std::string(to_string(spec.mode));
  return s;
}

std::string to_json(const ProductSpec& spec) { return spec_json(spec).dump(); }

EnhancementMap run_product(const ProductSpec& spec, const HyperCube& cube, const TargetSpectrum& spectrum) {
  switch (spec.product) {
    case Product::kMatchedFilter: return matched_filter(cube, spectrum, spec.mode);
    case Product::kCem: return cem(cube, spectrum, spec.mode);
    case Product::kAce: return ace(cube, spectrum, spec.mode);
    case Product::kMag1c: {
      Mag1cConfig cfg = spec.mag1c;
      cfg.mode = spec.mode;
      return mag1c(cube, spectrum, cfg);
    }
    case Product::kMag1cSas: return mag1c_sas(cube, spectrum, spec.mag1c);
  }
  throw UsageError("unknown product");
}

ThresholdTable ThresholdTable::load(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError("threshold config " + path.string() + ": " + e.message());
  }
  ThresholdTable table;
  table.source_ = path;
  for (const auto& [section, body] : tree) {
    const auto value = body.get_optional<std::string>("threshold");
    if (!value) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(*value, &used);
      if (used != value->size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
      table.values_[section] = v;
    } catch (const std::exception&) {
      throw ParseError("threshold config " + path.string() + ": " + section + ".threshold is not a number");
    }
  }
  return table;
}

std::optional<double> ThresholdTable::find(std::string_view product) const {
  const auto it = values_.find(std::string(product));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double ThresholdTable::at(std::string_view product) const {
  if (auto v = find(product)) return *v;
  throw ValidationError("no threshold for '" + std::string(product) + "'" +
                        (source_.empty() ? std::string() : " in " + source_.string()));
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string to_json(const BenchReport& r) {
  nlohmann::json j = {{"product", r.product},
                      {"shape", {r.height, r.width, r.bands}},
                      {"config", nlohmann::json::parse(r.config_json)},
                      {"run_seconds", r.run_seconds},
                      {"median_seconds", r.median_seconds},
                      {"peak_memory_bytes", r.working_set_bytes},
                      {"peak_memory_source", "working-set estimate"},
                      {"process_max_rss_bytes", r.max_rss_bytes}};
  return j.dump(2);
}

std::uint64_t working_set_estimate(const ProductSpec& spec, std::size_t height, std::size_t width,
                                   std::size_t bands) {
  const std::uint64_t n = static_cast<std::uint64_t>(height) * width;
  const std::uint64_t p = bands;
  const std::uint64_t matrix = p * p * sizeof(double);
  const std::uint64_t vector = p * sizeof(double);
  const std::uint64_t threads = static_cast<std::uint64_t>(std::max(1, num_threads()));
  std::uint64_t bytes = n * sizeof(double);  // output map
  const bool column = spec.mode == ApplyMode::kColumn && spec.product != Product::kMag1cSas;
  const std::uint64_t scopes_live = column ? std::min<std::uint64_t>(threads, width) : 1;
  // Dense statistics: mean, matrix, factor and a few work vectors.
  bytes += scopes_live * (2 * matrix + 8 * vector);
  if (spec.product == Product::kMag1c) {
    const std::uint64_t scope_pixels = column ? height : n;
    bytes += scopes_live * 2 * scope_pixels * sizeof(double);  // alpha and r
  } else if (spec.product == Product::kMag1cSas) {
    const std::uint64_t k = sample_indices(static_cast<std::size_t>(n), spec.mag1c.fraction).size();
    bytes += k * p * sizeof(float) + 2 * k * sizeof(double);
    bytes += 2 * n * sizeof(double);  // r and alpha0
  }
  return bytes;
}

std::uint64_t process_max_rss_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024u;
}

std::vector<double> time_runs(const std::function<void()>& body, const BenchOptions& options) {
  if (options.runs < 1) throw ValidationError("bench needs at least one timed run");
  for (std::size_t i = 0; i < options.warmup; ++i) body();
  std::vector<double> seconds;
  seconds.reserve(options.runs);
  for (std::size_t i = 0; i < options.runs; ++i) {
    const auto start = std::chrono::steady_clock::now();
    body();
    const auto stop = std::chrono::steady_clock::now();
    seconds.push_back(std::chrono::duration<double>(stop - start).count());
  }
  return seconds;
}

BenchReport bench_product(const ProductSpec& spec, const HyperCube& cube, const TargetSpectrum& spectrum,
                          const BenchOptions& options) {
  BenchReport report;
  report.product = label(spec);
  report.height = cube.height();
  report.width = cube.width();
  report.bands = cube.bands();
  auto config = spec_json(spec);
  config["runs"] = options.runs;
  config["warmup"] = options.warmup;
  config["threads"] = num_threads();
  report.config_json = config.dump();
  report.run_seconds = time_runs([&] { (void)run_product(spec, cube, spectrum); }, options);
  report.median_seconds = median(report.run_seconds);
  report.working_set_bytes = working_set_estimate(spec, cube.height(), cube.width(), cube.bands());
  report.max_rss_bytes = process_max_rss_bytes();
  return report;
}

}  // namespace methane
