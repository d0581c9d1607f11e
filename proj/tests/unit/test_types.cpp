#include <gtest/gtest.h>

#include <cmath>

#include "methane/error.hpp"
#include "methane/types.hpp"

namespace methane {
namespace {

TEST(HyperCube, Invariants) {
  EXPECT_NO_THROW(HyperCube(1, 2, {2100, 2200}, {1, 2, 3, 4}));
  EXPECT_THROW(HyperCube(0, 2, {2100}, {}), ValidationError);
  EXPECT_THROW(HyperCube(1, 1, {}, {}), ValidationError);
  EXPECT_THROW(HyperCube(1, 1, {2200, 2100}, {1, 2}), ValidationError);
  EXPECT_THROW(HyperCube(1, 1, {2100, 2100}, {1, 2}), ValidationError);
  EXPECT_THROW(HyperCube(1, 2, {2100, 2200}, {1, 2, 3}), SizeMismatchError);
}

TEST(HyperCube, BipIndexing) {
  const HyperCube c(2, 3, {1, 2}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  EXPECT_EQ(c.pixel(1, 2)[0], 10.0f);
  EXPECT_EQ(c.pixel(1, 2)[1], 11.0f);
  EXPECT_EQ(c.pixel(4)[0], 8.0f);
  EXPECT_EQ(c.pixel_count(), 6u);
}

TEST(TargetSpectrum, Invariants) {
  EXPECT_NO_THROW(TargetSpectrum({2100, 2200}, {-1, 0}));
  EXPECT_THROW(TargetSpectrum({2100, 2200}, {0, 0}), ValidationError);
  EXPECT_THROW(TargetSpectrum({2100}, {1, 2}), ValidationError);
  EXPECT_THROW(TargetSpectrum({}, {}), ValidationError);
  EXPECT_THROW(TargetSpectrum({2100, 2100}, {1, 2}), ValidationError);
  EXPECT_THROW(TargetSpectrum({2100, 2200}, {1, std::nan("")}), ValidationError);
}

TEST(Alignment, WithinTolerance) {
  const HyperCube c(1, 1, {2100, 2200}, {1, 2});
  EXPECT_NO_THROW(check_alignment(c, TargetSpectrum({2100.4, 2199.6}, {-1, -1})));
  EXPECT_THROW(check_alignment(c, TargetSpectrum({2100.6, 2200}, {-1, -1})), ValidationError);
  EXPECT_THROW(check_alignment(c, TargetSpectrum({2100}, {-1})), ValidationError);
}

TEST(Alignment, DropsUnmatchedBands) {
  // Visible channels in front of the spectral bands.
  const HyperCube c(1, 2, {470, 550, 640, 2100, 2200, 2300}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  const TargetSpectrum s({2000, 2100, 2300}, {-0.5, -1, -0.25});
  const auto a = align(c, s);
  EXPECT_EQ(a.cube.wavelengths(), (std::vector<double>{2100, 2300}));
  EXPECT_EQ(a.spectrum.values(), (std::vector<double>{-1, -0.25}));
  EXPECT_EQ(a.cube.pixel(1)[0], 10.0f);
  EXPECT_EQ(a.cube.pixel(1)[1], 12.0f);
  EXPECT_THROW(align(c, TargetSpectrum({2100, 2500}, {-1, -1})), ValidationError);
}

TEST(SelectCubeBands, CopiesBands) {
  const HyperCube c(1, 2, {1, 2, 3}, {1, 2, 3, 4, 5, 6});
  const std::vector<std::size_t> bands{0, 2};
  const auto s = select_cube_bands(c, bands);
  EXPECT_EQ(s, HyperCube(1, 2, {1, 3}, {1, 3, 4, 6}));
  const std::vector<std::size_t> bad{2, 0};
  EXPECT_THROW(select_cube_bands(c, bad), ValidationError);
}

TEST(PlumeMask, Count) {
  PlumeMask m(2, 2);
  m.values = {1, 0, 1, 1};
  EXPECT_EQ(m.count(), 3u);
  EXPECT_TRUE(m.at(1, 0));
}

}  // namespace
}  // namespace methane
