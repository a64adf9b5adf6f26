#include "depthprobe/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "depthprobe/error.hpp"

namespace depthprobe {

PixelCoord image_center(int width, int height) {
  return {(width - 1) / 2.0, (height - 1) / 2.0};
}

CenteredCoord to_centered(PixelCoord p, PixelCoord principal) {
  return {p.col - principal.col, p.row - principal.row};
}

PixelCoord to_pixel(CenteredCoord c, PixelCoord principal) {
  return {c.x + principal.col, c.y + principal.row};
}

void CameraModel::validate() const {
  auto fail = [](const char* what) { throw DomainError(std::string("invalid camera: ") + what); };
  if (!(f_px > 0.0) || !std::isfinite(f_px)) fail("f_px must be positive");
  if (!(cam_height_m > 0.0) || !std::isfinite(cam_height_m)) fail("cam_height_m must be positive");
  if (!(baseline_m > 0.0) || !std::isfinite(baseline_m)) fail("baseline_m must be positive");
  if (image_w_px <= 0 || image_h_px <= 0) fail("frame size must be positive");
  if (!(cx_px >= 0.0 && cx_px < image_w_px)) fail("cx_px outside frame");
  if (!(cy_px >= 0.0 && cy_px < image_h_px)) fail("cy_px outside frame");
}

CameraModel CameraModel::with_frame(int width, int height) const {
  CameraModel out = *this;
  out.image_w_px = width;
  out.image_h_px = height;
  const PixelCoord c = image_center(width, height);
  out.cx_px = c.col;
  out.cy_px = c.row;
  return out;
}

double GroundPlaneModel::rows_below_horizon(CenteredCoord p) const {
  if (roll_deg == 0.0) return p.y - horizon_y;
  const double a = roll_deg * std::numbers::pi / 180.0;
  // Normal of the horizon line, pointing toward the ground.
  return std::cos(a) * p.y - std::sin(a) * p.x - horizon_y;
}

double GroundPlaneModel::disparity_at(CenteredCoord p) const {
  const double below = rows_below_horizon(p);
  if (below <= 0.0) return 0.0;
  return camera.baseline_m * below / (camera.cam_height_m * camera.image_w_px);
}

double depth_from_apparent_size(const CameraModel& camera, double apparent_h_px, double true_h_m) {
  if (!(apparent_h_px > 0.0) || !(true_h_m > 0.0)) {
    throw DomainError("apparent and true size must be positive");
  }
  return camera.f_px * true_h_m / apparent_h_px;
}

double depth_from_vertical_position(const CameraModel& camera, double ground_y, double horizon_y) {
  if (!(ground_y > horizon_y)) {
    std::ostringstream os;
    os << "ground contact y=" << ground_y << " is not below horizon y=" << horizon_y;
    throw AboveHorizonError(os.str());
  }
  return camera.f_px * camera.cam_height_m / (ground_y - horizon_y);
}

double disparity_from_depth(const CameraModel& camera, double depth_m) {
  if (!(depth_m > 0.0)) throw DomainError("depth must be positive");
  return camera.f_px * camera.baseline_m / (depth_m * camera.image_w_px);
}

double depth_from_disparity(const CameraModel& camera, double disparity) {
  if (!(disparity > 0.0)) throw DomainError("disparity must be positive");
  return camera.f_px * camera.baseline_m / (disparity * camera.image_w_px);
}

Placement place_at_relative_distance(CenteredCoord contact, double horizon_y, double rel_dist) {
  if (!(rel_dist > 0.0) || !std::isfinite(rel_dist)) {
    throw DomainError("relative distance must be positive");
  }
  if (!(contact.y > horizon_y)) {
    throw AboveHorizonError("contact point must lie below the horizon");
  }
  Placement out;
  out.scale = 1.0 / rel_dist;
  out.contact.x = contact.x / rel_dist;
  out.contact.y = horizon_y + (contact.y - horizon_y) / rel_dist;
  return out;
}

std::vector<double> ground_disparity_profile(const GroundPlaneModel& plane,
                                             std::span<const double> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (double y : rows) out.push_back(plane.disparity_at({0.0, y}));
  return out;
}

}  // namespace depthprobe
