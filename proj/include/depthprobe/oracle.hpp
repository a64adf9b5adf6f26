#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "depthprobe/disparity.hpp"
#include "depthprobe/geometry.hpp"

namespace depthprobe {

/// GeometryAware reads the true scene geometry off the image it is given;
/// FixedPrior assumes the camera pose never changes and reads obstacle
/// distance from their lowest image point against a fixed ground prior.
enum class OracleMode { GeometryAware, FixedPrior };

std::string_view to_string(OracleMode mode);
OracleMode parse_oracle_mode(std::string_view name);

struct OracleObstacle {
  /// Polygon in centered coordinates of the rendered frame.
  std::vector<CenteredCoord> footprint;
  double depth_m = 0.0;
};

struct OracleSpec {
  OracleMode mode = OracleMode::GeometryAware;
  GroundPlaneModel plane;
  std::vector<OracleObstacle> obstacles;
  /// Ground assumed by FixedPrior.
  GroundPlaneModel prior_plane;
  double noise_sd = 0.0;

  void validate() const;
};

/// Analytic disparity map. Ground pixels follow the active plane, obstacle
/// footprints are filled with a constant disparity (nearer over farther), and
/// Gaussian noise of `noise_sd` is added from `seed` when nonzero.
DisparityMap render_oracle(const OracleSpec& spec, int width, int height, std::uint64_t seed = 0);

/// Disparity an oracle assigns to an obstacle.
double obstacle_disparity(const OracleSpec& spec, const OracleObstacle& obstacle);

/// Scene as seen through a pitch crop centered `offset_px` rows below the
/// frame center. The true ground moves with the window; the prior does not.
OracleSpec pitch_crop_scene(const OracleSpec& spec, int offset_px);

/// Scene as seen through a window rotated by `angle_deg` (see crop_roll).
OracleSpec roll_crop_scene(const OracleSpec& spec, double angle_deg);

}  // namespace depthprobe
