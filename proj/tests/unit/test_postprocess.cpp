#include <gtest/gtest.h>

#include <cmath>

#include "methane/error.hpp"
#include "methane/postprocess.hpp"
#include "oracles/oracles.hpp"
#include "support/generators.hpp"

namespace methane {
namespace {

oracle::Grid to_grid(const PlumeMask& m) {
  oracle::Grid g(m.height, std::vector<int>(m.width));
  for (std::size_t r = 0; r < m.height; ++r) {
    for (std::size_t c = 0; c < m.width; ++c) g[r][c] = m.at(r, c);
  }
  return g;
}

TEST(Morphology, AllBelowThreshold) {
  const EnhancementMap map{3, 3, std::vector<double>(9, 0.5), ""};
  EXPECT_EQ(morphological_baseline(map, {1.0}).count(), 0u);
}

TEST(Morphology, ThresholdIsStrict) {
  const EnhancementMap map{1, 3, {0.5, 1.0, 1.5}, ""};
  EXPECT_EQ(threshold_map(map, 1.0).values, (std::vector<std::uint8_t>{0, 0, 1}));
}

TEST(Morphology, SingletonRemoved) {
  EnhancementMap map{9, 9, std::vector<double>(81, 0.0), ""};
  map.values[4 * 9 + 4] = 5.0;
  EXPECT_EQ(morphological_baseline(map, {1.0}).count(), 0u);
}

TEST(Morphology, OpeningKeepsBlock) {
  EnhancementMap map{11, 11, std::vector<double>(121, 0.0), ""};
  for (std::size_t r = 3; r < 8; ++r) {
    for (std::size_t c = 4; c < 9; ++c) map.values[r * 11 + c] = 2.0;
  }
  const auto out = morphological_baseline(map, {1.0});
  EXPECT_EQ(out, threshold_map(map, 1.0));
  EXPECT_EQ(out.count(), 25u);
}

TEST(Morphology, BorderCountsAsUnset) {
  PlumeMask full(4, 5);
  std::fill(full.values.begin(), full.values.end(), 1);
  const auto e = erode(full, 3);
  EXPECT_EQ(e.count(), 2u * 3u);
  EXPECT_FALSE(e.at(0, 0));
  EXPECT_TRUE(e.at(1, 1));
  EXPECT_EQ(dilate(e, 3), full);
}

TEST(Morphology, MatchesSetOracle) {
  testing::Rng rng(81);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t h = 1 + rng.index(12), w = 1 + rng.index(12);
    const std::size_t k = 1 + 2 * rng.index(3);
    const auto m = testing::random_mask(rng, h, w, rng.uniform(0.2, 0.9));
    EXPECT_EQ(to_grid(erode(m, k)), oracle::erode(to_grid(m), static_cast<int>(k)));
    EXPECT_EQ(to_grid(dilate(m, k)), oracle::dilate(to_grid(m), static_cast<int>(k)));
  }
}

TEST(Morphology, KernelOneIsIdentity) {
  testing::Rng rng(82);
  const auto m = testing::random_mask(rng, 7, 9, 0.4);
  EXPECT_EQ(erode(m, 1), m);
  EXPECT_EQ(dilate(m, 1), m);
}

TEST(Morphology, IterationCounts) {
  testing::Rng rng(83);
  const auto map = testing::random_map(rng, 16, 16, 5);
  MorphConfig cfg{1.5, 3, 2, 0};
  EXPECT_EQ(morphological_baseline(map, cfg), erode(erode(threshold_map(map, 1.5), 3), 3));
  cfg = {1.5, 3, 0, 2};
  EXPECT_EQ(morphological_baseline(map, cfg), dilate(dilate(threshold_map(map, 1.5), 3), 3));
  cfg = {1.5, 5, 0, 0};
  EXPECT_EQ(morphological_baseline(map, cfg), threshold_map(map, 1.5));
}

TEST(Morphology, Validation) {
  const EnhancementMap map{1, 1, {0.0}, ""};
  EXPECT_THROW(morphological_baseline(map, {0.0, 2}), ValidationError);
  EXPECT_THROW(morphological_baseline(map, {0.0, 0}), ValidationError);
  EXPECT_THROW(erode(PlumeMask(2, 2), 4), ValidationError);
  EXPECT_THROW(morphological_baseline(map, {std::nan("")}), ValidationError);
  EXPECT_THROW(threshold_map(EnhancementMap{1, 1, {std::nan("")}, ""}, 0.0), ValidationError);
}

}  // namespace
}  // namespace methane
