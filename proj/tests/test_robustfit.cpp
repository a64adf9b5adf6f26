#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "depthprobe/oracle.hpp"
#include "depthprobe/random.hpp"
#include "depthprobe/robustfit.hpp"

using namespace depthprobe;

namespace {

DisparityMap ground_map(double horizon, double roll = 0.0) {
  OracleSpec s;
  s.plane.horizon_y = horizon;
  s.plane.roll_deg = roll;
  s.prior_plane = s.plane;
  return render_oracle(s, 1242, 375);
}

/// Replaces `frac` of the ground-region pixels with uniform random disparities.
DisparityMap corrupt(DisparityMap m, double frac, std::uint64_t seed) {
  const Rect reg = kGroundRegion.resolve(m.width(), m.height());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0), d(0.0, 0.1);
  for (int r = reg.row; r < reg.bottom(); ++r)
    for (int c = reg.col; c < reg.right(); ++c)
      if (u(rng) < frac) m.at(c, r) = d(rng);
  return m;
}

}  // namespace

TEST(GroundLine, NoiselessSlopeMatchesClosedForm) {
  const LineFit f = fit_ground_line_ransac(ground_map(-6.0));
  const double want = 0.54 / (1.65 * 1242.0);
  EXPECT_NEAR(f.slope / want, 1.0, 1e-6);
  EXPECT_NEAR(f.horizon_y(), -6.0, 1e-6);
  EXPECT_EQ(f.inlier_count, f.sample_count);
}

TEST(GroundLine, SurvivesTwentyPercentOutliers) {
  const double want = 0.54 / (1.65 * 1242.0);
  const DisparityMap clean = ground_map(-3.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RansacParams p;
    p.seed = seed;
    const LineFit f = fit_ground_line_ransac(corrupt(clean, 0.2, 1000 + seed), kGroundRegion, p);
    ASSERT_NEAR(f.slope / want, 1.0, 0.01) << "seed " << seed;
  }
}

TEST(GroundLine, ConstantRegionIsDegenerate) {
  DisparityMap m(200, 100, 0.02);
  EXPECT_THROW(fit_ground_line_ransac(m), DegenerateSceneError);
}

TEST(GroundLine, TooFewValidPixelsIsFitError) {
  DisparityMap m(200, 100, 0.02);
  m.valid = Mask(200, 100, 0);
  m.valid->at(100, 90) = 1;
  EXPECT_THROW(fit_ground_line_ransac(m), FitError);
}

TEST(Horizon, NoiselessRecovery) {
  for (double h : {-12.0, -7.5, 0.0, 4.0}) {
    const HorizonEstimate e = estimate_horizon(ground_map(h));
    EXPECT_NEAR(e.horizon_y, h, 0.5);
    EXPECT_NEAR(e.spread, 0.0, 1e-9);
    EXPECT_EQ(e.repeats, 5);
  }
}

TEST(Horizon, SingleRepeatEqualsSingleFit) {
  const DisparityMap m = corrupt(ground_map(-5.0), 0.1, 9);
  RansacParams p;
  p.seed = 17;
  EXPECT_DOUBLE_EQ(estimate_horizon(m, kGroundRegion, p, 1).horizon_y,
                   fit_ground_line_ransac(m, kGroundRegion, p).horizon_y());
}

TEST(Horizon, VerticalTranslationEquivariance) {
  const DisparityMap m = ground_map(-9.0);
  const double base = estimate_horizon(m).horizon_y;
  for (int k : {3, 8, 15}) {
    DisparityMap s(m.width(), m.height(), 0.0);
    for (int r = k; r < m.height(); ++r)
      for (int c = 0; c < m.width(); ++c) s.at(c, r) = m.at(c, r - k);
    EXPECT_NEAR(estimate_horizon(s).horizon_y - base, k, 1e-6);
  }
}

TEST(Horizon, HorizontalTranslationInvariance) {
  const DisparityMap m = ground_map(-2.0);
  DisparityMap s = m;
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c) s.at(c, r) = m.at((c + 37) % m.width(), r);
  EXPECT_NEAR(estimate_horizon(s).horizon_y, estimate_horizon(m).horizon_y, 1e-9);
}

TEST(Horizon, DeterministicAndSeedStable) {
  const DisparityMap m = corrupt(ground_map(-4.0), 0.2, 5);
  RansacParams a, b;
  b.seed = 99;
  EXPECT_EQ(estimate_horizon(m, kGroundRegion, a).horizon_y, estimate_horizon(m, kGroundRegion, a).horizon_y);
  EXPECT_NEAR(estimate_horizon(m, kGroundRegion, a).horizon_y, estimate_horizon(m, kGroundRegion, b).horizon_y, 1.0);
}

TEST(Roll, LevelGroundGivesZero) {
  const RollEstimate e = estimate_roll(ground_map(-5.0));
  EXPECT_NEAR(e.angle_deg, 0.0, HoughParams{}.angle_res_deg);
  EXPECT_GE(e.support, HoughParams{}.min_pixels);
}

TEST(Roll, RecoversRolledGround) {
  for (double a : {-3.0, -2.0, -1.0, 1.0, 2.0, 3.0}) {
    EXPECT_NEAR(estimate_roll(ground_map(-5.0, a)).angle_deg, a, 0.2) << a;
  }
}

TEST(Roll, RotationEquivariance) {
  const double base = estimate_roll(ground_map(-5.0, 0.5)).angle_deg;
  for (double d : {-2.0, 1.0, 2.5}) {
    EXPECT_NEAR(estimate_roll(ground_map(-5.0, 0.5 + d)).angle_deg - base, d, 2 * HoughParams{}.angle_res_deg);
  }
}

TEST(Roll, BandOutsideRangeIsBandEmpty) {
  EXPECT_THROW(estimate_roll(ground_map(-5.0), DisparityBand{0.5, 0.6}), BandEmptyError);
}

namespace {

/// Plain least squares written from the normal equations.
void ols(const std::vector<DataPoint>& p, double& slope, double& icpt, double& r) {
  double n = p.size(), sx = 0, sy = 0;
  for (auto& q : p) {
    sx += q.x;
    sy += q.y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (auto& q : p) {
    sxx += (q.x - mx) * (q.x - mx);
    syy += (q.y - my) * (q.y - my);
    sxy += (q.x - mx) * (q.y - my);
  }
  slope = sxy / sxx;
  icpt = my - slope * mx;
  r = sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST(Regression, ExactLine) {
  std::vector<DataPoint> p;
  for (int i = 0; i < 10; ++i) p.push_back({double(i), 2.0 * i + 1.0});
  const RegressionSummary s = regress_with_outlier_rejection(p);
  EXPECT_NEAR(s.slope, 2.0, 1e-12);
  EXPECT_NEAR(s.intercept, 1.0, 1e-12);
  EXPECT_NEAR(s.pearson_r, 1.0, 1e-12);
  EXPECT_EQ(s.n_outliers_removed, 0u);
  EXPECT_EQ(s.n_points, 10u);
}

TEST(Regression, GrossOutlierRemoved) {
  // Small alternating jitter keeps the residual SD non-zero; one point sits far off the line.
  std::vector<DataPoint> p;
  for (int i = 0; i < 30; ++i) p.push_back({double(i), 2.0 * i + 1.0 + (i % 2 ? 0.01 : -0.01)});
  p.push_back({15.5, 2.0 * 15.5 + 1.0 + 50.0});
  const RegressionSummary s = regress_with_outlier_rejection(p, 3.0);
  EXPECT_EQ(s.n_outliers_removed, 1u);
  EXPECT_NEAR(s.slope, 2.0, 1e-3);
  EXPECT_EQ(s.n_points, 30u);
}

TEST(Regression, DegenerateInputs) {
  EXPECT_THROW(regress_with_outlier_rejection(std::vector<DataPoint>{{0, 1}, {1, 2}}), StatisticsError);
  EXPECT_THROW(regress_with_outlier_rejection(std::vector<DataPoint>{{1, 1}, {1, 2}, {1, 3}}), StatisticsError);
}

TEST(Regression, InfiniteThresholdIsPlainOls) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 50; ++t) {
    std::vector<DataPoint> p;
    for (int i = 0; i < 40; ++i) p.push_back({n(rng) * 5, 0.7 * i + n(rng) * (t % 5 + 1)});
    double m, b, r;
    ols(p, m, b, r);
    const RegressionSummary s = regress_with_outlier_rejection(p, std::numeric_limits<double>::infinity());
    EXPECT_NEAR(s.slope, m, 1e-9 * (1 + std::abs(m)));
    EXPECT_NEAR(s.intercept, b, 1e-9 * (1 + std::abs(b)));
    EXPECT_NEAR(s.pearson_r, r, 1e-9);
    EXPECT_EQ(s.n_outliers_removed, 0u);
  }
}

TEST(Regression, PearsonInvariantUnderPositiveAffineRescaling) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1);
  std::vector<DataPoint> p, q;
  for (int i = 0; i < 50; ++i) {
    const double x = n(rng), y = 0.4 * x + n(rng);
    p.push_back({x, y});
    q.push_back({3.0 * x - 7.0, 0.25 * y + 100.0});
  }
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(regress_with_outlier_rejection(p, inf).pearson_r, regress_with_outlier_rejection(q, inf).pearson_r, 1e-12);
  EXPECT_LE(std::abs(regress_with_outlier_rejection(p).pearson_r), 1.0);
}

TEST(Regression, FlatResponseHasZeroCorrelation) {
  const std::vector<DataPoint> p{{-1, 0.0}, {0, 0.0}, {1, 0.0}, {2, 0.0}};
  const RegressionSummary s = regress_with_outlier_rejection(p);
  EXPECT_EQ(s.slope, 0.0);
  EXPECT_EQ(s.pearson_r, 0.0);
}

TEST(RegionMean, ConstantAndTwoPixel) {
  DisparityMap m(10, 10, 0.037);
  Mask mask(10, 10, 0);
  mask.at(2, 3) = mask.at(7, 7) = 1;
  EXPECT_DOUBLE_EQ(region_mean_disparity(m, mask), 0.037);
  m.at(2, 3) = 0.02;
  m.at(7, 7) = 0.04;
  EXPECT_NEAR(region_mean_disparity(m, mask), 0.03, 1e-15);
  EXPECT_THROW(region_mean_disparity(m, Mask(10, 10, 0)), DomainError);
}

TEST(RegionMean, FrontoParallelObstacle) {
  OracleSpec s;
  s.plane.horizon_y = -5;
  s.prior_plane = s.plane;
  s.obstacles.push_back({{{-50, 0}, {50, 0}, {50, 60}, {-50, 60}}, 17.3});
  const DisparityMap m = render_oracle(s, 1242, 375);
  const Mask mask = polygon_mask(s.obstacles[0].footprint, 1242, 375);
  EXPECT_NEAR(region_mean_disparity(m, mask), 700.0 * 0.54 / (17.3 * 1242.0), 1e-6);
}
