#include <gtest/gtest.h>

#include <cmath>

#include "methane/error.hpp"
#include "methane/log.hpp"
#include "methane/mag1c.hpp"
#include "methane/synth.hpp"
#include "oracles/oracles.hpp"
#include "support/generators.hpp"

namespace methane {
namespace {

double max_rel_error(const std::vector<double>& got, const std::vector<double>& ref) {
  double scale = 0.0;
  for (double v : ref) scale = std::max(scale, std::abs(v));
  double err = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(got[i] - ref[i]));
  return scale == 0.0 ? err : err / scale;
}

HyperCube small_scene(std::uint64_t seed, std::size_t h = 16, std::size_t w = 16, std::size_t p = 8) {
  auto cfg = strong_plume_scene(h, w, methane_range_grid(p), seed);
  return generate_scene(cfg).cube;
}

TEST(AlbedoWeights, Examples) {
  const std::vector<float> data{1, 1, 2, 2, 1, 0};
  const auto w = albedo_weights(PixelView::rows(data, 2), Eigen::Vector2d(1, 1));
  EXPECT_DOUBLE_EQ(w.r[0], 1.0);
  EXPECT_DOUBLE_EQ(w.r[1], 2.0);
  EXPECT_DOUBLE_EQ(w.r[2], 0.5);
  EXPECT_THROW(albedo_weights(PixelView::rows(data, 2), Eigen::Vector2d(0, 0)), ValidationError);
}

TEST(AlbedoWeights, ClampNonPositive) {
  AlbedoWeights w{{-1.0, 0.0, 0.3}};
  int warnings = 0;
  log::set_sink([&](log::Level level, std::string_view) { warnings += level == log::Level::kWarning; });
  clamp_albedo(w, "test");
  log::set_sink({});
  EXPECT_EQ(w.r[0], kMinAlbedo);
  EXPECT_EQ(w.r[1], kMinAlbedo);
  EXPECT_EQ(w.r[2], 0.3);
  EXPECT_EQ(warnings, 1);
}

TEST(SampleIndices, Examples) {
  const auto all = sample_indices(12, 1.0);
  ASSERT_EQ(all.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(all[i], i);
  EXPECT_EQ(sample_indices(10, 0.3), (std::vector<std::size_t>{0, 3, 6}));
  EXPECT_EQ(sample_indices(512 * 512, 0.01).size(), 2621u);
  EXPECT_EQ(sample_indices(50, 0.001).size(), 2u);
  EXPECT_THROW(sample_indices(10, 0.0), ValidationError);
  EXPECT_THROW(sample_indices(10, 1.5), ValidationError);
}

TEST(SampleUniform, GathersFlatPixels) {
  testing::Rng rng(31);
  const auto cube = testing::random_cube(rng, 5, 4, 3);
  const auto s = sample_uniform(cube, 0.25);
  const auto idx = sample_indices(20, 0.25);
  ASSERT_EQ(s.size(), idx.size() * 3);
  for (std::size_t j = 0; j < idx.size(); ++j) {
    for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(s[j * 3 + b], cube.pixel(idx[j])[b]);
  }
}

TEST(Mag1cConfig, Validation) {
  Mag1cConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_iter = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.epsilon = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.fraction = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Mag1c, MatchesTranscriptionTile) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto cube = small_scene(seed);
    const auto s = synthetic_methane_absorption(cube.wavelengths());
    for (std::size_t iters : {1u, 5u, 30u}) {
      Mag1cConfig cfg;
      cfg.n_iter = iters;
      cfg.mode = ApplyMode::kTile;
      const auto got = mag1c(cube, TargetSpectrum(cube.wavelengths(), s), cfg);
      const auto ref = oracle::mag1c(testing::pixels_of(cube), s, iters, cfg.epsilon);
      EXPECT_LE(max_rel_error(got.values, ref.alpha), 1e-6) << "seed " << seed << " iters " << iters;
    }
  }
}

TEST(Mag1c, MatchesTranscriptionColumn) {
  const auto cube = small_scene(4);
  const auto s = synthetic_methane_absorption(cube.wavelengths());
  Mag1cConfig cfg;
  cfg.n_iter = 5;
  const auto got = mag1c(cube, TargetSpectrum(cube.wavelengths(), s), cfg);
  for (std::size_t col = 0; col < cube.width(); ++col) {
    const auto ref = oracle::mag1c(testing::column_pixels(cube, col), s, 5, cfg.epsilon);
    std::vector<double> column;
    for (std::size_t row = 0; row < cube.height(); ++row) column.push_back(got.at(row, col));
    EXPECT_LE(max_rel_error(column, ref.alpha), 1e-6) << col;
  }
}

TEST(Mag1c, NonNegativeAfterOneIteration) {
  testing::Rng rng(32);
  const auto cube = testing::random_cube(rng, 12, 12, 6);
  const auto t = testing::random_target(rng, cube.wavelengths());
  Mag1cConfig cfg;
  cfg.n_iter = 1;
  for (auto mode : {ApplyMode::kTile, ApplyMode::kColumn}) {
    cfg.mode = mode;
    for (double v : mag1c(cube, t, cfg).values) EXPECT_GE(v, 0.0);
  }
}

TEST(Mag1c, MeanAlphaDecreasesOnMethaneFreeScene) {
  auto cfg = strong_plume_scene(64, 64, methane_range_grid(20), 5);
  cfg.plumes.clear();
  const auto scene = generate_scene(cfg);
  Mag1cConfig mc;
  mc.n_iter = 5;
  const auto result = albedo_reweight_l1_filter(PixelView::tile(scene.cube), to_eigen(cfg.target), mc);
  ASSERT_EQ(result.mean_alpha.size(), 5u);
  for (std::size_t k = 2; k < 5; ++k) EXPECT_LT(result.mean_alpha[k], result.mean_alpha[k - 1]) << k;
}

TEST(Mag1c, IdenticalColumnsGiveIdenticalMapColumns) {
  testing::Rng rng(33);
  const auto base = testing::random_cube(rng, 10, 1, 5);
  std::vector<float> data;
  for (std::size_t r = 0; r < 10; ++r) {
    for (int c = 0; c < 4; ++c) {
      const auto px = base.pixel(r);
      data.insert(data.end(), px.begin(), px.end());
    }
  }
  const HyperCube cube(10, 4, base.wavelengths(), data);
  const auto t = testing::random_target(rng, base.wavelengths());
  Mag1cConfig cfg;
  cfg.n_iter = 5;
  const auto map = mag1c(cube, t, cfg);
  cfg.mode = ApplyMode::kTile;
  const auto single = mag1c(base, t, cfg);
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(map.at(r, c), single.values[r]);
  }
}

TEST(Mag1c, TileModeOnSingleColumnEqualsColumnMode) {
  testing::Rng rng(34);
  const auto cube = testing::random_cube(rng, 30, 1, 6);
  const auto t = testing::random_target(rng, cube.wavelengths());
  Mag1cConfig cfg;
  cfg.n_iter = 4;
  const auto col = mag1c(cube, t, cfg);
  cfg.mode = ApplyMode::kTile;
  EXPECT_EQ(col.values, mag1c(cube, t, cfg).values);
}

TEST(Mag1c, ConstantScopeStaysFinite) {
  // A flat background: alpha^0 is zero almost everywhere and epsilon keeps w finite.
  std::vector<float> data;
  testing::Rng rng(35);
  for (int i = 0; i < 64; ++i) {
    for (int b = 0; b < 4; ++b) data.push_back(1.0f + static_cast<float>(rng.normal() * 1e-3));
  }
  const HyperCube cube(8, 8, {2100, 2200, 2300, 2400}, data);
  Mag1cConfig cfg;
  cfg.mode = ApplyMode::kTile;
  for (double v : mag1c(cube, TargetSpectrum(cube.wavelengths(), {-1, -0.5, -0.2, -0.8}), cfg).values) {
    EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(Mag1cSas, MatchesTranscription) {
  const auto cube = small_scene(6, 32, 32, 8);
  const auto s = synthetic_methane_absorption(cube.wavelengths());
  for (double f : {1.0, 0.25}) {
    for (std::size_t iters : {1u, 5u}) {
      Mag1cConfig cfg;
      cfg.n_iter = iters;
      cfg.fraction = f;
      const auto got = mag1c_sas(cube, TargetSpectrum(cube.wavelengths(), s), cfg);
      const auto ref = oracle::mag1c_sas(testing::pixels_of(cube), s, iters, cfg.epsilon, f);
      EXPECT_LE(max_rel_error(got.values, ref), 1e-6) << f << " " << iters;
    }
  }
}

TEST(Mag1cSas, StageTwoWithoutSparsityIsAlbedoMatchedFilter) {
  testing::Rng rng(36);
  const auto cube = testing::random_cube(rng, 16, 16, 6);
  const auto t = testing::random_target(rng, cube.wavelengths());
  Mag1cConfig cfg;
  cfg.n_iter = 5;
  const auto sample = sample_uniform(cube, 0.1);
  const auto params = compute_parameters(PixelView::rows(sample, 6), to_eigen(t.values()), cfg);
  const auto alpha = lightweight_filter(PixelView::tile(cube), params, cfg, {false, false});
  const double m = std::max(params.m, 1.0);
  for (std::size_t i = 0; i < cube.pixel_count(); ++i) {
    Eigen::VectorXd x = PixelView::tile(cube).vec(i).cast<double>();
    double r = x.dot(params.mu) / params.mu.squaredNorm();
    const double expected = (x - params.mu).dot(params.t_vec) / (r * m);
    EXPECT_NEAR(alpha[i], expected, 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Mag1cSas, ParamsAreConsistent) {
  const auto cube = small_scene(7, 32, 32, 8);
  const auto s = to_eigen(synthetic_methane_absorption(cube.wavelengths()));
  Mag1cConfig cfg;
  const auto sample = sample_uniform(cube, 0.5);
  const auto params = compute_parameters(PixelView::rows(sample, 8), s, cfg);
  EXPECT_TRUE(params.mu.allFinite());
  EXPECT_TRUE(params.t_vec.allFinite());
  EXPECT_GE(params.m, -1e-9);
  EXPECT_NEAR(params.m, params.mu.cwiseProduct(s).dot(params.t_vec), 1e-9 * std::abs(params.m));
}

TEST(Mag1cSas, LightweightNeverExceedsInitialEstimate) {
  testing::Rng rng(37);
  const auto cube = testing::random_cube(rng, 16, 16, 6);
  const auto t = testing::random_target(rng, cube.wavelengths());
  Mag1cConfig cfg;
  const auto sample = sample_uniform(cube, 0.2);
  const auto params = compute_parameters(PixelView::rows(sample, 6), to_eigen(t.values()), cfg);
  const auto base = lightweight_filter(PixelView::tile(cube), params, cfg, {false, false});
  const auto alpha = lightweight_filter(PixelView::tile(cube), params, cfg);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    EXPECT_GE(alpha[i], 0.0);
    EXPECT_LE(alpha[i], std::max(base[i], 0.0));
  }
}

TEST(Mag1cSas, TinySampleRejected) {
  const std::vector<float> one{1, 2, 3};
  EXPECT_THROW(compute_parameters(PixelView::rows(one, 3), Eigen::Vector3d(1, 1, 1), {}), ValidationError);
}

}  // namespace
}  // namespace methane
