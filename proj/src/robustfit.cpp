#include "depthprobe/robustfit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "depthprobe/random.hpp"

namespace depthprobe {

namespace {

struct LsLine {
  double slope = 0.0;
  double intercept = 0.0;
};

LsLine least_squares(std::span<const DataPoint> pts) {
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  const double n = static_cast<double>(pts.size());
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
  }
  if (!(sxx > 0.0)) throw StatisticsError("x values have no variance; slope undefined");
  LsLine l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  return l;
}

}  // namespace

LineFit fit_ground_line_ransac(const DisparityMap& map, const FracRect& region,
                               const RansacParams& params) {
  if (params.iterations <= 0 || !(params.inlier_tol > 0.0)) {
    throw ConfigError("RANSAC needs positive iterations and inlier tolerance");
  }
  const Rect rect = region.resolve(map.width(), map.height());
  const double center_row = image_center(map.width(), map.height()).row;

  std::vector<DataPoint> pts;
  pts.reserve(static_cast<std::size_t>(rect.width) * rect.height);
  for (int r = rect.row; r < rect.bottom(); ++r) {
    for (int c = rect.col; c < rect.right(); ++c) {
      if (map.is_valid(c, r)) pts.push_back({r - center_row, map.at(c, r)});
    }
  }
  if (pts.size() < 2) throw FitError("fewer than two valid pixels in the ground region");

  Rng rng(params.seed);
  // Scoring subset: partial Fisher-Yates over indices.
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t n_score = std::min(pts.size(), std::max<std::size_t>(params.max_samples, 2));
  for (std::size_t i = 0; i < n_score; ++i) {
    std::swap(idx[i], idx[i + uniform_index(rng, pts.size() - i)]);
  }
  const std::span<const std::size_t> scored(idx.data(), n_score);

  std::size_t best_count = 0;
  LsLine best;
  bool found = false;
  for (int it = 0; it < params.iterations; ++it) {
    const DataPoint& a = pts[scored[uniform_index(rng, n_score)]];
    const DataPoint& b = pts[scored[uniform_index(rng, n_score)]];
    if (a.x == b.x) continue;
    const double slope = (b.y - a.y) / (b.x - a.x);
    const double intercept = a.y - slope * a.x;
    std::size_t count = 0;
    for (std::size_t i : scored) {
      if (std::abs(pts[i].y - (slope * pts[i].x + intercept)) <= params.inlier_tol) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best = {slope, intercept};
      found = true;
    }
  }
  if (!found) throw DegenerateSceneError("no two sampled pixels lie on different rows");

  std::vector<DataPoint> inliers;
  for (const auto& p : pts) {
    if (std::abs(p.y - (best.slope * p.x + best.intercept)) <= params.inlier_tol) inliers.push_back(p);
  }
  const double frac = static_cast<double>(inliers.size()) / static_cast<double>(pts.size());
  if (frac < params.min_inlier_frac) {
    throw DegenerateSceneError("ground consensus of " + std::to_string(frac) +
                               " is below the minimum inlier fraction");
  }
  LsLine refined;
  try {
    refined = least_squares(inliers);
  } catch (const StatisticsError&) {
    throw DegenerateSceneError("ground inliers all lie on one row");
  }
  // A flat or inverted ground never reaches zero disparity below the sky.
  const double scale = std::max(1e-300, std::abs(refined.intercept));
  if (!(refined.slope > 1e-12 * scale) || !(refined.slope > 0.0)) {
    throw DegenerateSceneError("fitted ground disparity does not increase downward");
  }
  LineFit out;
  out.slope = refined.slope;
  out.intercept = refined.intercept;
  out.inlier_count = inliers.size();
  out.sample_count = pts.size();
  out.region = rect;
  return out;
}

HorizonEstimate estimate_horizon(const DisparityMap& map, const FracRect& region,
                                 const RansacParams& params, int repeats) {
  if (repeats < 1) throw ConfigError("horizon estimation needs at least one repeat");
  std::vector<double> hs;
  hs.reserve(static_cast<std::size_t>(repeats));
  for (int k = 0; k < repeats; ++k) {
    RansacParams p = params;
    p.seed = params.seed + static_cast<std::uint64_t>(k);
    hs.push_back(fit_ground_line_ransac(map, region, p).horizon_y());
  }
  HorizonEstimate est;
  est.repeats = repeats;
  est.horizon_y = std::accumulate(hs.begin(), hs.end(), 0.0) / repeats;
  if (repeats > 1) {
    double ss = 0.0;
    for (double h : hs) ss += (h - est.horizon_y) * (h - est.horizon_y);
    est.spread = std::sqrt(ss / (repeats - 1));
  }
  return est;
}

RollEstimate estimate_roll(const DisparityMap& map, const DisparityBand& band, const HoughParams& hough) {
  if (!(hough.angle_res_deg > 0.0) || !(hough.rho_res_px > 0.0) || !(hough.angle_range_deg >= 0.0) ||
      hough.angle_range_deg > 45.0) {
    throw ConfigError("invalid Hough parameters");
  }
  const PixelCoord center = image_center(map.width(), map.height());
  std::vector<CenteredCoord> pts;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (!map.is_valid(c, r)) continue;
      const double d = map.at(c, r);
      if (d >= band.lo && d <= band.hi) pts.push_back({c - center.col, r - center.row});
    }
  }
  if (pts.size() < hough.min_pixels) {
    throw BandEmptyError("only " + std::to_string(pts.size()) + " pixels in disparity band [" +
                         std::to_string(band.lo) + ", " + std::to_string(band.hi) + "]");
  }

  const int n_angles = static_cast<int>(std::lround(2.0 * hough.angle_range_deg / hough.angle_res_deg)) + 1;
  const double rho_max = std::hypot(center.col, center.row) + hough.rho_res_px;
  const int n_rho = static_cast<int>(std::ceil(2.0 * rho_max / hough.rho_res_px)) + 1;
  std::vector<std::uint32_t> acc(static_cast<std::size_t>(n_angles) * n_rho, 0);
  std::vector<double> angles(n_angles);
  for (int k = 0; k < n_angles; ++k) {
    angles[k] = -hough.angle_range_deg + k * hough.angle_res_deg;
    const double a = angles[k] * std::numbers::pi / 180.0;
    const double s = std::sin(a), co = std::cos(a);
    std::uint32_t* row = acc.data() + static_cast<std::size_t>(k) * n_rho;
    for (const auto& p : pts) {
      // Distance along the line normal (-sin, cos).
      const double rho = co * p.y - s * p.x;
      const int bin = static_cast<int>(std::floor((rho + rho_max) / hough.rho_res_px));
      ++row[bin];
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < acc.size(); ++i) {
    if (acc[i] > acc[best]) {
      best = i;
    } else if (acc[i] == acc[best]) {
      // Prefer the smaller tilt on ties.
      const double cur = std::abs(angles[best / n_rho]);
      if (std::abs(angles[i / n_rho]) < cur) best = i;
    }
  }
  RollEstimate est;
  est.angle_deg = angles[best / n_rho];
  est.support = pts.size();
  return est;
}

RegressionSummary regress_with_outlier_rejection(std::span<const DataPoint> points, double threshold_sd) {
  if (points.size() < 3) throw StatisticsError("regression needs at least three points");
  if (!(threshold_sd > 0.0)) throw StatisticsError("outlier threshold must be positive");

  const LsLine first = least_squares(points);
  double ss = 0.0, max_abs_y = 0.0;
  for (const auto& p : points) {
    const double res = p.y - (first.slope * p.x + first.intercept);
    ss += res * res;
    max_abs_y = std::max(max_abs_y, std::abs(p.y));
  }
  const double res_sd = std::sqrt(ss / static_cast<double>(points.size() - 2));

  std::vector<DataPoint> kept;
  kept.reserve(points.size());
  // Residuals at rounding level are an exact fit, not outliers.
  const bool reject = res_sd > 1e-12 * std::max(1.0, max_abs_y) && std::isfinite(threshold_sd);
  for (const auto& p : points) {
    const double res = p.y - (first.slope * p.x + first.intercept);
    if (reject && std::abs(res) > threshold_sd * res_sd) continue;
    kept.push_back(p);
  }
  if (kept.size() < 2) throw StatisticsError("outlier rejection removed all points");

  const LsLine fit = least_squares(kept);
  double mx = 0.0, my = 0.0;
  for (const auto& p : kept) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(kept.size());
  my /= static_cast<double>(kept.size());
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : kept) {
    sxx += (p.x - mx) * (p.x - mx);
    syy += (p.y - my) * (p.y - my);
    sxy += (p.x - mx) * (p.y - my);
  }

  RegressionSummary out;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.pearson_r = syy > 0.0 ? std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0) : 0.0;
  out.n_points = kept.size();
  out.n_outliers_removed = points.size() - kept.size();
  out.outlier_threshold_sd = threshold_sd;
  return out;
}

double region_mean_disparity(const DisparityMap& map, const Mask& mask) {
  if (mask.width() != map.width() || mask.height() != map.height()) {
    throw DomainError("measurement mask does not match disparity map");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (!mask.at(c, r) || !map.is_valid(c, r)) continue;
      sum += map.at(c, r);
      ++n;
    }
  }
  if (n == 0) throw DomainError("measurement mask covers no valid pixels");
  return sum / static_cast<double>(n);
}

}  // namespace depthprobe
