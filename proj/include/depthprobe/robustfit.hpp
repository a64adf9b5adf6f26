#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "depthprobe/disparity.hpp"
#include "depthprobe/raster.hpp"

namespace depthprobe {

struct RansacParams {
  int iterations = 200;
  /// Inlier band half-width, in normalized disparity.
  double inlier_tol = 0.001;
  double min_inlier_frac = 0.3;
  std::uint64_t seed = 0;
  /// Hypotheses are scored on at most this many randomly chosen pixels; the
  /// final inlier set and refinement always use every pixel in the region.
  std::size_t max_samples = 4000;
};

/// Road surface region sampled for the ground fit: central half of the
/// width, bottom 40% of the height.
inline constexpr FracRect kGroundRegion{0.25, 0.6, 0.75, 1.0};

/// disparity = slope * y + intercept, y centered on the map's middle row.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t inlier_count = 0;
  std::size_t sample_count = 0;
  Rect region;

  /// Row where the fitted ground reaches zero disparity.
  double horizon_y() const { return -intercept / slope; }
};

/// Two-point RANSAC over (row, disparity) pairs inside `region`, refined by
/// least squares on the inliers. Deterministic for a given seed.
///
/// Throws FitError with fewer than two valid pixels, DegenerateSceneError if
/// the consensus is below `min_inlier_frac` or the slope is not positive.
LineFit fit_ground_line_ransac(const DisparityMap& map, const FracRect& region = kGroundRegion,
                               const RansacParams& params = {});

struct HorizonEstimate {
  double horizon_y = 0.0;
  /// Sample standard deviation over repeats (0 for a single repeat).
  double spread = 0.0;
  int repeats = 1;
};

/// Mean of `repeats` ground-line extrapolations, the k-th using seed + k.
HorizonEstimate estimate_horizon(const DisparityMap& map, const FracRect& region = kGroundRegion,
                                 const RansacParams& params = {}, int repeats = 5);

struct DisparityBand {
  double lo = 0.030;
  double hi = 0.031;
};

struct HoughParams {
  double angle_res_deg = 0.1;
  double angle_range_deg = 10.0;
  double rho_res_px = 1.0;
  std::size_t min_pixels = 50;
};

struct RollEstimate {
  /// Angle of the iso-disparity line; positive rotates +x toward +y.
  double angle_deg = 0.0;
  std::size_t support = 0;
};

/// Strongest straight line through the pixels whose disparity lies in
/// `band`. Throws BandEmptyError with fewer than `min_pixels` band pixels.
RollEstimate estimate_roll(const DisparityMap& map, const DisparityBand& band = {},
                           const HoughParams& hough = {});

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
};

struct RegressionSummary {
  double slope = 0.0;
  double intercept = 0.0;
  /// 0 when the retained y values have no variance.
  double pearson_r = 0.0;
  std::size_t n_points = 0;
  std::size_t n_outliers_removed = 0;
  double outlier_threshold_sd = 3.0;
};

/// Ordinary least squares; points whose residual exceeds threshold_sd
/// residual standard deviations are removed once and the line refitted.
/// An infinite threshold gives plain OLS.
RegressionSummary regress_with_outlier_rejection(std::span<const DataPoint> points,
                                                 double threshold_sd = 3.0);

/// Mean of the valid disparities under `mask`.
double region_mean_disparity(const DisparityMap& map, const Mask& mask);

}  // namespace depthprobe
