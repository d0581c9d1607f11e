#include "methane/cube_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "methane/error.hpp"

namespace methane {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kDtype = "f32le";
constexpr const char* kLayout = "bip";

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
  return v;
}

void write_payload(std::span<const float> values, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    words[i] = to_le(std::bit_cast<std::uint32_t>(values[i]));
  }
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_header(std::size_t h, std::size_t w, const std::vector<double>& wavelengths, const fs::path& path) {
  json header = {{"height", h},
                 {"width", w},
                 {"bands", wavelengths.size()},
                 {"wavelengths", wavelengths},
                 {"dtype", kDtype},
                 {"layout", kLayout}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << header.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::size_t get_dim(const json& header, const char* key) {
  const auto& v = header.at(key);
  if (!v.is_number_unsigned()) throw FormatError(std::string("header field '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

struct Container {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> wavelengths;
  std::vector<float> data;
};

Container read_container(const fs::path& path) {
  const auto hp = header_path(path);
  std::ifstream hin(hp);
  if (!hin) throw FormatError("missing cube header " + hp.string());
  json header;
  try {
    header = json::parse(hin);
  } catch (const json::exception& e) {
    throw FormatError("corrupt cube header " + hp.string() + ": " + e.what());
  }
  static const std::set<std::string> kKeys = {"height", "width", "bands", "wavelengths", "dtype", "layout"};
  if (!header.is_object()) throw FormatError("cube header must be a JSON object");
  std::set<std::string> keys;
  for (const auto& item : header.items()) keys.insert(item.key());
  if (keys != kKeys) throw FormatError("cube header must contain exactly the keys height, width, bands, wavelengths, dtype, layout");

  Container c;
  std::size_t bands = 0;
  try {
    c.height = get_dim(header, "height");
    c.width = get_dim(header, "width");
    bands = get_dim(header, "bands");
    if (header.at("dtype") != kDtype) throw FormatError("unsupported dtype (expected f32le)");
    if (header.at("layout") != kLayout) throw FormatError("unsupported layout (expected bip)");
    const auto& wl = header.at("wavelengths");
    if (!wl.is_array()) throw FormatError("wavelengths must be an array");
    for (const auto& w : wl) {
      if (!w.is_number()) throw FormatError("wavelengths must be numbers");
      c.wavelengths.push_back(w.get<double>());
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt cube header: ") + e.what());
  }
  if (c.wavelengths.size() != bands) throw FormatError("header 'bands' does not match the wavelength count");
  if (c.height == 0 || c.width == 0 || bands == 0) throw ValidationError("cube dimensions must be positive");
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max() / sizeof(float);
  if (c.height > kMax / c.width || c.height * c.width > kMax / bands) throw FormatError("cube dimensions overflow");

  const auto pp = payload_path(path);
  std::error_code ec;
  const auto bytes = fs::file_size(pp, ec);
  if (ec) throw IoError("cannot stat payload " + pp.string());
  const std::size_t count = c.height * c.width * bands;
  if (bytes != count * sizeof(float)) {
    std::ostringstream os;
    os << "payload " << pp.string() << " holds " << bytes << " bytes, header declares " << count << " f32 values ("
       << count * sizeof(float) << " bytes)";
    throw SizeMismatchError(os.str());
  }
  std::vector<std::uint32_t> words(count);
  std::ifstream in(pp, std::ios::binary);
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw IoError("failed reading " + pp.string());
  c.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) c.data[i] = std::bit_cast<float>(to_le(words[i]));
  return c;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& cell, std::size_t line_no) {
  const std::string t = trim(cell);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": '" + t + "' is not a number");
  }
  return v;
}

}  // namespace

fs::path header_path(const fs::path& path) {
  auto p = path;
  return p.replace_extension(".json");
}

fs::path payload_path(const fs::path& path) {
  auto p = path;
  return p.replace_extension(".bin");
}

HyperCube read_cube(const fs::path& path) {
  auto c = read_container(path);
  return HyperCube(c.height, c.width, std::move(c.wavelengths), std::move(c.data));
}

void write_cube(const HyperCube& cube, const fs::path& path) {
  // HyperCube enforces its invariants on construction, so a cube reaching
  // here is valid; NaN-bearing data is rejected when the cube is built.
  write_payload(cube.data(), payload_path(path));
  write_header(cube.height(), cube.width(), cube.wavelengths(), header_path(path));
}

TargetSpectrum load_spectrum(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spectrum " + path.string());
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (!header_seen) {
      if (cells.size() != 2 || trim(cells[0]) != "wavelength_nm" || trim(cells[1]) != "value") {
        throw ParseError("spectrum header must be 'wavelength_nm,value'");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 2) throw ParseError("line " + std::to_string(line_no) + ": expected 2 cells");
    rows.emplace_back(parse_number(cells[0], line_no), parse_number(cells[1], line_no));
  }
  if (!header_seen) throw ParseError("spectrum file " + path.string() + " is empty");
  if (rows.empty()) throw ParseError("spectrum file " + path.string() + " has no rows");
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> wl;
  std::vector<double> values;
  for (const auto& [w, v] : rows) {
    wl.push_back(w);
    values.push_back(v);
  }
  return TargetSpectrum(std::move(wl), std::move(values));
}

void write_spectrum(const TargetSpectrum& spectrum, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "wavelength_nm,value\n";
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    out << spectrum.wavelengths()[i] << ',' << spectrum.values()[i] << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_map(const EnhancementMap& map, const fs::path& path) {
  if (map.values.size() != map.height * map.width) throw ValidationError("map size does not match its shape");
  std::vector<float> data(map.values.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(map.values[i])) throw ValidationError("map contains non-finite values");
    data[i] = static_cast<float>(map.values[i]);
  }
  write_payload(data, payload_path(path));
  write_header(map.height, map.width, {0.0}, header_path(path));
}

EnhancementMap read_map(const fs::path& path) {
  auto c = read_container(path);
  if (c.wavelengths.size() != 1) throw FormatError("map container must have exactly one band");
  EnhancementMap map;
  map.height = c.height;
  map.width = c.width;
  map.values.assign(c.data.begin(), c.data.end());
  if (!std::all_of(map.values.begin(), map.values.end(), [](double v) { return std::isfinite(v); })) {
    throw ValidationError("map contains non-finite values");
  }
  return map;
}

void write_mask(const PlumeMask& mask, const fs::path& path) {
  EnhancementMap map{mask.height, mask.width, std::vector<double>(mask.values.begin(), mask.values.end()), "mask"};
  write_map(map, path);
}

PlumeMask read_mask(const fs::path& path) {
  const auto map = read_map(path);
  PlumeMask mask(map.height, map.width);
  for (std::size_t i = 0; i < map.values.size(); ++i) mask.values[i] = map.values[i] > 0.5 ? 1 : 0;
  return mask;
}

void write_pgm(const EnhancementMap& map, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto [lo_it, hi_it] = std::minmax_element(map.values.begin(), map.values.end());
  const double lo = map.values.empty() ? 0.0 : *lo_it;
  const double hi = map.values.empty() ? 0.0 : *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P5\n" << map.width << ' ' << map.height << "\n255\n";
  std::vector<unsigned char> pixels(map.values.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = static_cast<unsigned char>(std::lround(255.0 * (map.values[i] - lo) / span));
  }
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace methane
