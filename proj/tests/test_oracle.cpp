#include <gtest/gtest.h>

#include "depthprobe/imgsynth.hpp"
#include "depthprobe/oracle.hpp"
#include "depthprobe/robustfit.hpp"

using namespace depthprobe;

namespace {

OracleSpec street(double h) {
  OracleSpec s;
  s.plane.horizon_y = h;
  s.prior_plane.horizon_y = 0.0;
  s.obstacles.push_back({{{-300, 20}, {-200, 20}, {-200, 70}, {-300, 70}}, 14.0});
  s.obstacles.push_back({{{150, 10}, {260, 10}, {260, 55}, {150, 55}}, 22.0});
  return s;
}

}  // namespace

TEST(Oracle, EmptySceneIsTheGroundProfile) {
  OracleSpec s;
  s.plane.horizon_y = -8.0;
  const DisparityMap m = render_oracle(s, 1242, 375);
  std::vector<double> rows;
  for (int r = 0; r < 375; ++r) rows.push_back(r - 187.0);
  const auto prof = ground_disparity_profile(s.plane, rows);
  for (int r = 0; r < 375; ++r) {
    for (int c : {0, 400, 1241}) EXPECT_DOUBLE_EQ(m.at(c, r), prof[r]);
  }
  EXPECT_EQ(m.at(10, 0), 0.0);
}

TEST(Oracle, ObstacleDisparityClosedForm) {
  OracleSpec s;
  s.obstacles.push_back({{{-10, 40}, {10, 40}, {10, 60}, {-10, 60}}, 11.55});
  EXPECT_NEAR(obstacle_disparity(s, s.obstacles[0]), 0.026350, 5e-6);
  const DisparityMap m = render_oracle(s, 1242, 375);
  EXPECT_NEAR(m.at(620, 237), 700.0 * 0.54 / (11.55 * 1242.0), 1e-15);
}

TEST(Oracle, NearerObstacleWins) {
  OracleSpec s;
  s.obstacles.push_back({{{-40, 0}, {40, 0}, {40, 40}, {-40, 40}}, 20.0});
  s.obstacles.push_back({{{0, 20}, {80, 20}, {80, 60}, {0, 60}}, 8.0});
  const DisparityMap m = render_oracle(s, 1242, 375);
  EXPECT_DOUBLE_EQ(m.at(640, 217), disparity_from_depth(s.plane.camera, 8.0));
  EXPECT_DOUBLE_EQ(m.at(600, 197), disparity_from_depth(s.plane.camera, 20.0));
}

TEST(Oracle, DeterministicAndSeededNoise) {
  OracleSpec s = street(-4.0);
  EXPECT_EQ(render_oracle(s, 300, 200), render_oracle(s, 300, 200));
  s.noise_sd = 0.002;
  EXPECT_EQ(render_oracle(s, 300, 200, 5), render_oracle(s, 300, 200, 5));
  EXPECT_NE(render_oracle(s, 300, 200, 5), render_oracle(s, 300, 200, 6));
}

TEST(Oracle, ValidateRejectsBadObstacles) {
  OracleSpec s = street(0.0);
  s.obstacles[0].depth_m = 0.0;
  EXPECT_THROW(render_oracle(s, 100, 100), DomainError);
  s = street(0.0);
  s.noise_sd = -1.0;
  EXPECT_THROW(render_oracle(s, 100, 100), DomainError);
}

TEST(Oracle, GeometryAwarePitchSceneEqualsCropOfFullRender) {
  const OracleSpec s = street(-6.0);
  const DisparityMap full = render_oracle(s, 1242, 375);
  for (int o : {-30, -10, 0, 20, 30}) {
    const CropSize cs = crop_size(1242, 375, kPitchCropHeightFrac, kPitchCropWidthFrac);
    const DisparityMap crop = render_oracle(pitch_crop_scene(s, o), cs.width, cs.height);
    const Raster<double> want = crop_pitch(full.values, o);
    ASSERT_EQ(crop.width(), want.width());
    for (int r = 0; r < want.height(); ++r)
      for (int c = 0; c < want.width(); ++c) ASSERT_NEAR(crop.at(c, r), want.at(c, r), 1e-15) << o;
  }
}

TEST(Oracle, FixedPriorIgnoresPitchCrop) {
  OracleSpec s = street(-6.0);
  s.mode = OracleMode::FixedPrior;
  const CropSize cs = crop_size(1242, 375, kPitchCropHeightFrac, kPitchCropWidthFrac);
  const DisparityMap central = render_oracle(pitch_crop_scene(s, 0), cs.width, cs.height);
  OracleSpec prior_only;
  prior_only.plane = s.prior_plane;
  const Raster<double> window = crop_pitch(render_oracle(prior_only, 1242, 375).values, 0);
  for (int o : {-30, -20, -10, 10, 20, 30}) {
    OracleSpec bare = pitch_crop_scene(s, o);
    bare.obstacles.clear();
    EXPECT_EQ(render_oracle(bare, cs.width, cs.height).values, window);
    OracleSpec bare0 = pitch_crop_scene(s, 0);
    bare0.obstacles.clear();
    EXPECT_NEAR(estimate_horizon(render_oracle(bare, cs.width, cs.height)).horizon_y,
                estimate_horizon(render_oracle(bare0, cs.width, cs.height)).horizon_y, 1e-9);
    // Obstacles follow the window, but the prior map keeps them near the same horizon.
    const HorizonEstimate e = estimate_horizon(render_oracle(pitch_crop_scene(s, o), cs.width, cs.height));
    EXPECT_NEAR(e.horizon_y, estimate_horizon(central).horizon_y, 0.5);
  }
}

TEST(Oracle, GeometryAwareHorizonRecovered) {
  for (double h : {-15.0, -9.0, -1.0}) {
    EXPECT_NEAR(estimate_horizon(render_oracle(street(h), 1242, 375)).horizon_y, h, 0.5);
  }
}

TEST(Oracle, RollSceneTiltsRenderedHorizon) {
  for (double a : {-3.0, 2.0}) {
    const OracleSpec s = roll_crop_scene(street(-5.0), a);
    const CropSize cs = crop_size(1242, 375, kRollCropHeightFrac, kRollCropWidthFrac);
    EXPECT_NEAR(estimate_roll(render_oracle(s, cs.width, cs.height)).angle_deg, -a, 0.2);
  }
}

TEST(Oracle, ModeNames) {
  EXPECT_EQ(parse_oracle_mode(to_string(OracleMode::FixedPrior)), OracleMode::FixedPrior);
  EXPECT_EQ(parse_oracle_mode("GeometryAware"), OracleMode::GeometryAware);
  EXPECT_THROW(parse_oracle_mode("psychic"), ConfigError);
}
