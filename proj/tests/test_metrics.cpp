#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "depthprobe/metrics.hpp"
#include "oracles.hpp"

using namespace depthprobe;

namespace {

const CameraModel kCam;

/// Disparity map whose single pixel sits at depth z.
DisparityMap at_depth(double z) { return DisparityMap(1, 1, disparity_from_depth(kCam, z)); }

}  // namespace

TEST(Metrics, IdentityGivesPerfectScores) {
  std::mt19937_64 rng(1);
  DisparityMap pred, gt;
  oracle::random_map_pair(rng, 16, 16, pred, gt);
  const MetricSet m = compute_metrics(gt, gt, kCam);
  EXPECT_EQ(m.abs_rel, 0.0);
  EXPECT_EQ(m.sq_rel, 0.0);
  EXPECT_EQ(m.rmse_m, 0.0);
  EXPECT_EQ(m.rmse_log, 0.0);
  EXPECT_EQ(m.d1_all_pct, 0.0);
  EXPECT_EQ(m.delta1, 1.0);
  EXPECT_EQ(m.delta2, 1.0);
  EXPECT_EQ(m.delta3, 1.0);
}

TEST(Metrics, SinglePixelHandArithmetic) {
  const MetricSet m = compute_metrics(at_depth(2.0), at_depth(1.0), kCam);
  EXPECT_NEAR(m.abs_rel, 1.0, 1e-12);
  EXPECT_NEAR(m.sq_rel, 1.0, 1e-12);
  EXPECT_NEAR(m.rmse_m, 1.0, 1e-12);
  EXPECT_NEAR(m.rmse_log, std::log(2.0), 1e-12);
  EXPECT_EQ(m.delta1, 0.0);
  EXPECT_EQ(m.delta2, 0.0);
  EXPECT_EQ(m.delta3, 0.0);
}

TEST(Metrics, MatchesBruteForceOnRandomPairs) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    DisparityMap pred, gt;
    oracle::random_map_pair(rng, 16, 16, pred, gt);
    const MetricSet a = compute_metrics(pred, gt, kCam);
    const MetricSet b = oracle::brute_force_metrics(pred, gt, kCam);
    ASSERT_LE(oracle::max_abs_diff(a, b), 1e-12) << "pair " << i;
    ASSERT_EQ(a.d1_all_pct, b.d1_all_pct);
    ASSERT_LE(a.delta1, a.delta2);
    ASSERT_LE(a.delta2, a.delta3);
    ASSERT_GE(a.d1_all_pct, 0.0);
    ASSERT_LE(a.d1_all_pct, 100.0);
  }
}

TEST(Metrics, PermutationInvariant) {
  std::mt19937_64 rng(7);
  DisparityMap pred, gt;
  oracle::random_map_pair(rng, 16, 16, pred, gt);
  std::vector<int> perm(256);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  DisparityMap p2 = pred, g2 = gt;
  for (int i = 0; i < 256; ++i) {
    const int j = perm[i];
    p2.values.pixels()[i] = pred.values.pixels()[j];
    g2.values.pixels()[i] = gt.values.pixels()[j];
    p2.valid->pixels()[i] = pred.valid->pixels()[j];
    g2.valid->pixels()[i] = gt.valid->pixels()[j];
  }
  EXPECT_LE(oracle::max_abs_diff(compute_metrics(pred, gt, kCam), compute_metrics(p2, g2, kCam)), 1e-12);
}

TEST(Metrics, ContentOutsideCropIgnored) {
  std::mt19937_64 rng(8);
  DisparityMap pred, gt;
  oracle::random_map_pair(rng, 16, 16, pred, gt);
  EvalConfig cfg;
  cfg.eval_crop = FracRect{0.25, 0.5, 0.75, 1.0};
  const MetricSet before = compute_metrics(pred, gt, kCam, cfg);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 16; ++c) pred.at(c, r) = 0.19;
  EXPECT_EQ(compute_metrics(pred, gt, kCam, cfg), before);
}

TEST(Metrics, CommonDepthScaling) {
  // Depths well inside the clamp range so scaling never saturates.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> z(5.0, 15.0), j(0.6, 1.5);
  DisparityMap pred(16, 16), gt(16, 16);
  std::vector<double> zp(256), zg(256);
  for (int i = 0; i < 256; ++i) {
    zg[i] = z(rng);
    zp[i] = zg[i] * j(rng);
  }
  EvalConfig cfg;
  cfg.depth_cap_m = 1000.0;
  for (double k : {0.5, 3.0}) {
    for (int i = 0; i < 256; ++i) {
      pred.values.pixels()[i] = disparity_from_depth(kCam, zp[i]);
      gt.values.pixels()[i] = disparity_from_depth(kCam, zg[i]);
    }
    const MetricSet a = compute_metrics(pred, gt, kCam, cfg);
    for (int i = 0; i < 256; ++i) {
      pred.values.pixels()[i] = disparity_from_depth(kCam, k * zp[i]);
      gt.values.pixels()[i] = disparity_from_depth(kCam, k * zg[i]);
    }
    const MetricSet b = compute_metrics(pred, gt, kCam, cfg);
    EXPECT_NEAR(b.abs_rel, a.abs_rel, 1e-12);
    EXPECT_NEAR(b.rmse_log, a.rmse_log, 1e-12);
    EXPECT_EQ(b.delta1, a.delta1);
    EXPECT_EQ(b.delta2, a.delta2);
    EXPECT_EQ(b.delta3, a.delta3);
    EXPECT_NEAR(b.rmse_m, k * a.rmse_m, 1e-9);
    EXPECT_NEAR(b.sq_rel, k * a.sq_rel, 1e-9);
  }
}

TEST(Metrics, D1UsesBothThresholdsInclusively) {
  // gt 60 px; a 3 px error is exactly 5%.
  const double w = kCam.image_w_px;
  DisparityMap gt(3, 1, 60.0 / w), pred(3, 1);
  pred.at(0, 0) = 63.0 / w;  // 3 px, 5%: counted
  pred.at(1, 0) = 62.0 / w;  // 2 px: not counted
  pred.at(2, 0) = 57.0 / w;  // 3 px below: counted
  EXPECT_NEAR(compute_metrics(pred, gt, kCam).d1_all_pct, 200.0 / 3.0, 1e-9);
}

TEST(Metrics, InvalidPredictionCountsAsFarthestDepth) {
  DisparityMap gt = at_depth(10.0), pred = at_depth(10.0);
  pred.valid = Mask(1, 1, 0);
  const MetricSet m = compute_metrics(pred, gt, kCam);
  EXPECT_NEAR(m.abs_rel, (80.0 - 10.0) / 10.0, 1e-12);
}

TEST(Metrics, DepthGroundTruthKind) {
  DisparityMap gt(1, 1, 12.0);
  EvalConfig cfg;
  cfg.gt_kind = GroundTruthKind::DepthMeters;
  const MetricSet m = compute_metrics(at_depth(12.0), gt, kCam, cfg);
  EXPECT_NEAR(m.abs_rel, 0.0, 1e-12);
}

TEST(Metrics, ErrorsAreTyped) {
  EXPECT_THROW(compute_metrics(DisparityMap(2, 2), DisparityMap(3, 2), kCam), DomainError);
  EXPECT_THROW(compute_metrics(DisparityMap(2, 2), DisparityMap(2, 2), kCam), EvaluationError);
  EvalConfig bad;
  bad.min_depth_m = 100.0;
  EXPECT_THROW(compute_metrics(at_depth(5), at_depth(5), kCam, bad), ConfigError);
}

TEST(Metrics, MeanOfSets) {
  MetricSet a, b;
  a.abs_rel = 0.1;
  b.abs_rel = 0.3;
  a.delta1 = 1.0;
  EXPECT_NEAR(mean_metrics({a, b}).abs_rel, 0.2, 1e-15);
  EXPECT_NEAR(mean_metrics({a, b}).delta1, 0.5, 1e-15);
  EXPECT_THROW(mean_metrics({}), EvaluationError);
}

namespace {

MetricSet row(double abs_rel, double sq, double rmse, double rlog, double d1, double a1, double a2, double a3) {
  return MetricSet{abs_rel, sq, rmse, rlog, d1, a1, a2, a3};
}

}  // namespace

TEST(Comparison, IdenticalRowsHaveZeroDeltasAndNoFlags) {
  const MetricSet m = row(0.1, 1, 5, 0.2, 10, 0.8, 0.9, 0.95);
  const MetricComparison c = compare_metric_rows({{"Unmodified", m}, {"Grayscale", m}, {"FalseColors", m}});
  for (const auto& [k, d] : c.deltas) EXPECT_EQ(d, MetricSet{}) << k;
  EXPECT_TRUE(c.flags.empty());
  EXPECT_FALSE(c.value_channel_pattern);
}

TEST(Comparison, SingleRowDeltaIsElementwiseDifference) {
  const MetricSet base = row(0.1, 1, 5, 0.2, 10, 0.8, 0.9, 0.95);
  const MetricSet other = row(0.15, 1.5, 6, 0.25, 12, 0.7, 0.85, 0.93);
  const MetricComparison c = compare_metric_rows({{"Unmodified", base}, {"Grayscale", other}});
  const MetricSet& d = c.deltas.at("Grayscale");
  for (const auto& name : metric_names()) {
    EXPECT_NEAR(metric_value(d, name), metric_value(other, name) - metric_value(base, name), 1e-15) << name;
  }
  EXPECT_EQ(c.rankings.at("abs_rel"), (std::vector<std::string>{"Unmodified", "Grayscale"}));
  EXPECT_EQ(c.rankings.at("delta1"), (std::vector<std::string>{"Unmodified", "Grayscale"}));
}

TEST(Comparison, PublishedTableShowsValueChannelPattern) {
  const std::map<std::string, MetricSet> rows{
      {"Unmodified", row(0.124, 1.388, 6.125, 0.217, 30.272, 0.841, 0.936, 0.975)},
      {"Grayscale", row(0.130, 1.457, 6.350, 0.227, 31.975, 0.831, 0.930, 0.972)},
      {"FalseColors", row(0.128, 1.257, 6.355, 0.237, 34.865, 0.816, 0.920, 0.966)},
      {"SemanticRgb", row(0.192, 2.556, 8.087, 0.305, 43.360, 0.730, 0.881, 0.945)},
      {"ClassAverageColors", row(0.199, 2.298, 8.285, 0.324, 47.203, 0.704, 0.865, 0.937)},
  };
  const MetricComparison c = compare_metric_rows(rows);
  EXPECT_LE(c.deltas.at("Grayscale").abs_rel, 0.006 + 1e-12);
  EXPECT_LE(c.deltas.at("FalseColors").abs_rel, 0.006 + 1e-12);
  EXPECT_GE(c.deltas.at("SemanticRgb").abs_rel, 0.068 - 1e-12);
  EXPECT_GE(c.deltas.at("ClassAverageColors").abs_rel, 0.068 - 1e-12);
  EXPECT_TRUE(c.value_channel_pattern);
}

TEST(Comparison, NeedsBaselineAndTwoRows) {
  const MetricSet m = row(0.1, 1, 5, 0.2, 10, 0.8, 0.9, 0.95);
  EXPECT_THROW(compare_metric_rows({{"Grayscale", m}, {"FalseColors", m}}), ConfigError);
  EXPECT_THROW(compare_metric_rows({{"Unmodified", m}}), ConfigError);
}

TEST(MetricsCsv, FixedColumnOrder) {
  const std::string csv = metric_rows_csv({{"Unmodified", row(0.5, 1, 2, 3, 4, 0.25, 0.5, 0.75)}});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "condition,abs_rel,sq_rel,rmse,rmse_log,d1_all,delta1,delta2,delta3");
  EXPECT_NE(csv.find("Unmodified,0.5,1,2,3,4,0.25,0.5,0.75"), std::string::npos);
}
