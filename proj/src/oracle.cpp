#include "depthprobe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "depthprobe/random.hpp"
#include "depthprobe/raster.hpp"

namespace depthprobe {

std::string_view to_string(OracleMode mode) {
  return mode == OracleMode::GeometryAware ? "GeometryAware" : "FixedPrior";
}

OracleMode parse_oracle_mode(std::string_view name) {
  if (name == "GeometryAware" || name == "geometry") return OracleMode::GeometryAware;
  if (name == "FixedPrior" || name == "prior") return OracleMode::FixedPrior;
  throw ConfigError("unknown oracle mode '" + std::string(name) + "'");
}

void OracleSpec::validate() const {
  plane.camera.validate();
  prior_plane.camera.validate();
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw DomainError("noise_sd must be >= 0");
  for (const auto& ob : obstacles) {
    if (!(ob.depth_m > 0.0) || !std::isfinite(ob.depth_m)) {
      throw DomainError("obstacle depth must be positive");
    }
    if (ob.footprint.size() < 3) throw DomainError("obstacle footprint needs at least three vertices");
  }
}

double obstacle_disparity(const OracleSpec& spec, const OracleObstacle& obstacle) {
  if (spec.mode == OracleMode::GeometryAware) return disparity_from_depth(spec.plane.camera, obstacle.depth_m);
  const auto lowest = std::max_element(obstacle.footprint.begin(), obstacle.footprint.end(),
                                       [](const CenteredCoord& a, const CenteredCoord& b) { return a.y < b.y; });
  return spec.prior_plane.disparity_at(*lowest);
}

DisparityMap render_oracle(const OracleSpec& spec, int width, int height, std::uint64_t seed) {
  spec.validate();
  const GroundPlaneModel& ground = spec.mode == OracleMode::GeometryAware ? spec.plane : spec.prior_plane;
  DisparityMap map(width, height);
  const PixelCoord center = image_center(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) map.at(c, r) = ground.disparity_at({c - center.col, r - center.row});
  }

  std::vector<double> disp(spec.obstacles.size());
  for (std::size_t i = 0; i < disp.size(); ++i) disp[i] = obstacle_disparity(spec, spec.obstacles[i]);
  std::vector<std::size_t> order(disp.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return disp[a] < disp[b]; });
  for (std::size_t i : order) {
    const Mask fp = polygon_mask(spec.obstacles[i].footprint, width, height);
    for (std::size_t k = 0; k < fp.size(); ++k) {
      if (fp.pixels()[k]) map.values.pixels()[k] = disp[i];
    }
  }

  if (spec.noise_sd > 0.0) {
    Rng rng(seed);
    for (double& d : map.values.pixels()) {
      d = std::clamp(d + spec.noise_sd * standard_normal(rng), 0.0, 0.999);
    }
  }
  return map;
}

OracleSpec pitch_crop_scene(const OracleSpec& spec, int offset_px) {
  OracleSpec out = spec;
  const double a = spec.plane.roll_deg * std::numbers::pi / 180.0;
  out.plane.horizon_y = spec.plane.horizon_y - offset_px * std::cos(a);
  for (auto& ob : out.obstacles) {
    for (auto& v : ob.footprint) v.y -= offset_px;
  }
  return out;
}

OracleSpec roll_crop_scene(const OracleSpec& spec, double angle_deg) {
  OracleSpec out = spec;
  out.plane.roll_deg = spec.plane.roll_deg - angle_deg;
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double ca = std::cos(a), sa = std::sin(a);
  for (auto& ob : out.obstacles) {
    for (auto& v : ob.footprint) {
      // Inverse of the crop's sampling rotation.
      v = {ca * v.x + sa * v.y, -sa * v.x + ca * v.y};
    }
  }
  return out;
}

}  // namespace depthprobe
