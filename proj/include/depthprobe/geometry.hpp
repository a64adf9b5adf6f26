#pragma once

#include <span>
#include <vector>

namespace depthprobe {

/// Offset from the principal point in pixels; x rightward, y downward.
struct CenteredCoord {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const CenteredCoord&, const CenteredCoord&) = default;
};

/// Continuous pixel position. Pixel (c, r) has its center at (c, r).
struct PixelCoord {
  double col = 0.0;
  double row = 0.0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Geometric center of a raster, in pixel coordinates.
PixelCoord image_center(int width, int height);

CenteredCoord to_centered(PixelCoord p, PixelCoord principal);
PixelCoord to_pixel(CenteredCoord c, PixelCoord principal);

/// Pinhole camera over a flat ground plane. Disparities throughout the
/// library are normalized by `image_w_px`, so `d = f * B / (Z * W)`.
struct CameraModel {
  double f_px = 700.0;
  double cx_px = 620.5;
  double cy_px = 187.0;
  double cam_height_m = 1.65;
  double baseline_m = 0.54;
  int image_w_px = 1242;
  int image_h_px = 375;

  /// Throws DomainError if any invariant is violated.
  void validate() const;

  PixelCoord principal() const { return {cx_px, cy_px}; }

  /// Same intrinsics, nominal frame resized with the principal point at its center.
  CameraModel with_frame(int width, int height) const;
};

/// Flat ground seen by `camera`. `roll_deg` tilts the horizon line about the
/// principal point; positive angles rotate +x toward +y (clockwise on screen).
struct GroundPlaneModel {
  double horizon_y = 0.0;
  CameraModel camera;
  double roll_deg = 0.0;

  /// Signed distance of `p` below the horizon line, in pixels.
  double rows_below_horizon(CenteredCoord p) const;

  /// Normalized ground disparity at `p`; 0 at and above the horizon.
  double disparity_at(CenteredCoord p) const;
};

double depth_from_apparent_size(const CameraModel& camera, double apparent_h_px, double true_h_m);

/// Throws AboveHorizonError when `ground_y <= horizon_y`.
double depth_from_vertical_position(const CameraModel& camera, double ground_y, double horizon_y);

double disparity_from_depth(const CameraModel& camera, double depth_m);
double depth_from_disparity(const CameraModel& camera, double disparity);

struct Placement {
  double scale = 1.0;
  CenteredCoord contact;
};

/// Scale and ground contact of an object moved to `rel_dist` times its
/// original distance along the flat ground:
///   s = 1/r,  x' = x/r,  y' = h + (y - h)/r.
Placement place_at_relative_distance(CenteredCoord contact, double horizon_y, double rel_dist);

/// Ground disparity along the principal column for each centered row.
std::vector<double> ground_disparity_profile(const GroundPlaneModel& plane,
                                             std::span<const double> rows);

}  // namespace depthprobe
