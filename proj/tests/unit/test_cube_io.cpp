#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "methane/cube_io.hpp"
#include "methane/error.hpp"
#include "support/generators.hpp"
#include "support/temp_dir.hpp"

namespace methane {
namespace {

using testing::TempDir;

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

void write_floats(const std::filesystem::path& p, std::size_t n) {
  std::ofstream out(p, std::ios::binary);
  const float v = 1.0f;
  for (std::size_t i = 0; i < n; ++i) out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::string header(std::size_t h, std::size_t w, std::size_t p) {
  nlohmann::json j;
  j["height"] = h;
  j["width"] = w;
  j["bands"] = p;
  std::vector<double> wl;
  for (std::size_t b = 0; b < p; ++b) wl.push_back(2100.0 + 10.0 * b);
  j["wavelengths"] = wl;
  j["dtype"] = "f32le";
  j["layout"] = "bip";
  return j.dump();
}

TEST(CubeIo, RoundtripIsBitExact) {
  TempDir dir;
  testing::Rng rng(51);
  const auto cube = testing::random_cube(rng, 7, 5, 4);
  write_cube(cube, dir / "c.bin");
  EXPECT_EQ(read_cube(dir / "c.bin"), cube);
  EXPECT_EQ(read_cube(dir / "c.json"), cube);
  EXPECT_EQ(read_cube(dir / "c"), cube);
}

TEST(CubeIo, SmallestCube) {
  TempDir dir;
  const HyperCube cube(1, 1, {2100, 2101}, {0.5f, 0.25f});
  write_cube(cube, dir / "tiny");
  const auto back = read_cube(dir / "tiny");
  EXPECT_EQ(back.height(), 1u);
  EXPECT_EQ(back.bands(), 2u);
  EXPECT_EQ(back.data()[0], 0.5f);
  EXPECT_EQ(back.data()[1], 0.25f);
}

TEST(CubeIo, HeaderHasExactKeys) {
  TempDir dir;
  write_cube(HyperCube(1, 2, {2100, 2200}, {1, 2, 3, 4}), dir / "c");
  std::ifstream in(dir / "c.json");
  const auto j = nlohmann::json::parse(in);
  std::set<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.insert(k);
  EXPECT_EQ(keys, (std::set<std::string>{"height", "width", "bands", "wavelengths", "dtype", "layout"}));
  EXPECT_EQ(j["dtype"], "f32le");
  EXPECT_EQ(j["layout"], "bip");
}

TEST(CubeIo, PayloadSizeMismatch) {
  TempDir dir;
  write_text(dir / "c.json", header(10, 10, 5));
  write_floats(dir / "c.bin", 499);
  EXPECT_THROW(read_cube(dir / "c"), SizeMismatchError);
  write_floats(dir / "c.bin", 501);
  EXPECT_THROW(read_cube(dir / "c"), SizeMismatchError);
  write_floats(dir / "c.bin", 500);
  EXPECT_NO_THROW(read_cube(dir / "c"));
}

TEST(CubeIo, PayloadSizeForFullTile) {
  TempDir dir;
  std::vector<double> wl;
  for (int b = 0; b < 72; ++b) wl.push_back(2100.0 + 5.0 * b);
  const HyperCube cube(512, 512, wl, std::vector<float>(512ull * 512 * 72, 1.0f));
  write_cube(cube, dir / "big");
  EXPECT_EQ(std::filesystem::file_size(dir / "big.bin"), 512ull * 512 * 72 * 4);
}

TEST(CubeIo, LittleEndianPayload) {
  TempDir dir;
  write_cube(HyperCube(1, 1, {2100, 2200}, {1.0f, -2.0f}), dir / "c");
  std::ifstream in(dir / "c.bin", std::ios::binary);
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  // 1.0f = 0x3F800000, -2.0f = 0xC0000000
  EXPECT_EQ(bytes[0], 0x00);
  EXPECT_EQ(bytes[3], 0x3F);
  EXPECT_EQ(bytes[2], 0x80);
  EXPECT_EQ(bytes[7], 0xC0);
}

TEST(CubeIo, NonFiniteCubeRejected) {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(HyperCube(1, 1, {2100, 2200}, {nan, 1.0f}), ValidationError);
  EXPECT_THROW(HyperCube(1, 1, {2100, 2200}, {std::numeric_limits<float>::infinity(), 1.0f}), ValidationError);
}

TEST(CubeIo, NonFinitePayloadRejectedOnRead) {
  TempDir dir;
  write_text(dir / "c.json", header(1, 1, 2));
  std::ofstream out(dir / "c.bin", std::ios::binary);
  const float v[2] = {1.0f, std::numeric_limits<float>::quiet_NaN()};
  out.write(reinterpret_cast<const char*>(v), sizeof v);
  out.close();
  EXPECT_THROW(read_cube(dir / "c"), ValidationError);
}

TEST(CubeIo, MissingHeader) {
  TempDir dir;
  write_floats(dir / "c.bin", 4);
  EXPECT_THROW(read_cube(dir / "c"), FormatError);
}

TEST(CubeIo, MissingPayload) {
  TempDir dir;
  write_text(dir / "c.json", header(1, 1, 2));
  EXPECT_THROW(read_cube(dir / "c"), Error);
}

TEST(CubeIo, NonIncreasingWavelengths) {
  TempDir dir;
  auto j = nlohmann::json::parse(header(1, 1, 3));
  j["wavelengths"] = {2100, 2100, 2200};
  write_text(dir / "c.json", j.dump());
  write_floats(dir / "c.bin", 3);
  EXPECT_THROW(read_cube(dir / "c"), ValidationError);
}

TEST(CubeIo, MalformedHeaders) {
  TempDir dir;
  write_floats(dir / "c.bin", 4);
  const auto base = nlohmann::json::parse(header(1, 2, 2));
  std::vector<std::string> bad{"", "{", "[]", "null", "{\"height\":1}"};
  auto mutate = [&](auto fn) {
    auto j = base;
    fn(j);
    bad.push_back(j.dump());
  };
  mutate([](auto& j) { j["height"] = -1; });
  mutate([](auto& j) { j["height"] = 1.5; });
  mutate([](auto& j) { j["width"] = "2"; });
  mutate([](auto& j) { j["bands"] = 3; });
  mutate([](auto& j) { j["dtype"] = "f64le"; });
  mutate([](auto& j) { j["layout"] = "bsq"; });
  mutate([](auto& j) { j["wavelengths"] = "2100"; });
  mutate([](auto& j) { j["wavelengths"] = {2100, "x"}; });
  mutate([](auto& j) { j["extra"] = 1; });
  mutate([](auto& j) { j.erase("layout"); });
  mutate([](auto& j) { j["height"] = 0; });
  for (const auto& text : bad) {
    write_text(dir / "c.json", text);
    EXPECT_THROW(read_cube(dir / "c"), Error) << text;
  }
}

TEST(CubeIo, HeaderFuzzNeverYieldsInvalidCube) {
  // Random byte edits of a valid header either fail cleanly or produce a cube
  // that satisfies every invariant.
  TempDir dir;
  testing::Rng rng(52);
  const auto cube = testing::random_cube(rng, 3, 2, 3);
  write_cube(cube, dir / "c");
  std::string valid;
  {
    std::ifstream in(dir / "c.json");
    valid.assign(std::istreambuf_iterator<char>(in), {});
  }
  const std::string alphabet = "0123456789-.,:{}[]\"e ";
  int accepted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::string text = valid;
    const std::size_t edits = 1 + rng.index(3);
    for (std::size_t e = 0; e < edits; ++e) text[rng.index(text.size())] = alphabet[rng.index(alphabet.size())];
    write_text(dir / "c.json", text);
    try {
      const auto got = read_cube(dir / "c");
      ++accepted;
      ASSERT_EQ(got.pixel_count() * got.bands(), got.data().size());
      for (std::size_t b = 1; b < got.bands(); ++b) ASSERT_LT(got.wavelengths()[b - 1], got.wavelengths()[b]);
      for (float v : got.data()) ASSERT_TRUE(std::isfinite(v));
    } catch (const Error&) {
    }
  }
  SUCCEED() << accepted << " mutated headers accepted";
}

TEST(CubeIo, UnwritablePath) {
  const HyperCube cube(1, 1, {2100, 2200}, {1, 2});
  EXPECT_THROW(write_cube(cube, "/nonexistent_dir_for_test/c"), IoError);
}

TEST(Spectrum, TwoRows) {
  TempDir dir;
  write_text(dir / "s.csv", "wavelength_nm,value\n2100,-1.0\n2300,-0.5\n");
  const auto s = load_spectrum(dir / "s.csv");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.wavelengths(), (std::vector<double>{2100, 2300}));
  EXPECT_EQ(s.values(), (std::vector<double>{-1.0, -0.5}));
}

TEST(Spectrum, SortedOnLoad) {
  TempDir dir;
  write_text(dir / "s.csv", "wavelength_nm,value\n2300,-0.5\n2100,-1.0\n2200,0.25\n");
  const auto s = load_spectrum(dir / "s.csv");
  EXPECT_EQ(s.wavelengths(), (std::vector<double>{2100, 2200, 2300}));
  EXPECT_EQ(s.values(), (std::vector<double>{-1.0, 0.25, -0.5}));
}

TEST(Spectrum, Errors) {
  TempDir dir;
  write_text(dir / "empty.csv", "");
  EXPECT_THROW(load_spectrum(dir / "empty.csv"), ParseError);
  write_text(dir / "dup.csv", "wavelength_nm,value\n2100,-1\n2100,-2\n");
  EXPECT_THROW(load_spectrum(dir / "dup.csv"), ValidationError);
  write_text(dir / "nan.csv", "wavelength_nm,value\n2100,abc\n");
  EXPECT_THROW(load_spectrum(dir / "nan.csv"), ParseError);
  write_text(dir / "hdr.csv", "wl,v\n2100,1\n");
  EXPECT_THROW(load_spectrum(dir / "hdr.csv"), ParseError);
  write_text(dir / "cells.csv", "wavelength_nm,value\n2100,1,2\n");
  EXPECT_THROW(load_spectrum(dir / "cells.csv"), ParseError);
  EXPECT_THROW(load_spectrum(dir / "missing.csv"), IoError);
}

TEST(Spectrum, Roundtrip) {
  TempDir dir;
  const TargetSpectrum s({2100.5, 2200.25, 2301}, {-0.123456789012345, 0.5, -1e-7});
  write_spectrum(s, dir / "s.csv");
  EXPECT_EQ(load_spectrum(dir / "s.csv"), s);
}

TEST(MapIo, RoundtripAndMask) {
  TempDir dir;
  EnhancementMap map{2, 3, {0.0, 1.5, -2.0, 0.25, 3.0, 0.75}, "mf"};
  write_map(map, dir / "m");
  const auto back = read_map(dir / "m");
  EXPECT_EQ(back.height, 2u);
  EXPECT_EQ(back.width, 3u);
  EXPECT_EQ(back.values, map.values);  // values are exact in float

  PlumeMask mask(2, 2);
  mask.values = {1, 0, 0, 1};
  write_mask(mask, dir / "k");
  EXPECT_EQ(read_mask(dir / "k"), mask);

  const auto thresholded = read_mask(dir / "m");
  EXPECT_EQ(thresholded.values, (std::vector<std::uint8_t>{0, 1, 0, 0, 1, 1}));
}

TEST(MapIo, RejectsMultiBandContainer) {
  TempDir dir;
  write_cube(HyperCube(1, 1, {2100, 2200}, {1, 2}), dir / "c");
  EXPECT_THROW(read_map(dir / "c"), FormatError);
}

TEST(MapIo, Pgm) {
  TempDir dir;
  write_pgm(EnhancementMap{2, 2, {0.0, 1.0, 2.0, 4.0}, "x"}, dir / "m.pgm");
  std::ifstream in(dir / "m.pgm", std::ios::binary);
  std::string magic;
  std::size_t w, h, maxval;
  in >> magic >> w >> h >> maxval;
  in.get();
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(w, 2u);
  EXPECT_EQ(h, 2u);
  EXPECT_EQ(maxval, 255u);
  unsigned char px[4];
  in.read(reinterpret_cast<char*>(px), 4);
  EXPECT_EQ(px[0], 0);
  EXPECT_EQ(px[3], 255);
}

}  // namespace
}  // namespace methane
