#pragma once

#include <cstdint>

#include "depthprobe/dataset.hpp"

namespace depthprobe {

/// Procedural street-like scenes with known geometry, used for oracle
/// closed-loop checks and as a demo dataset.
struct SyntheticParams {
  int n_scenes = 20;
  std::uint64_t seed = 0;
  CameraModel camera{};
  /// Horizon rows are drawn uniformly from this centered range.
  double horizon_min = -15.0;
  double horizon_max = 0.0;
  int obstacles_per_scene = 2;
  int n_cutouts = 4;
  /// Noise on the rendered ground-truth disparity.
  double gt_noise_sd = 0.001;
};

/// Scenes carry an oracle description, true horizon, noisy ground truth, a
/// semantic map and one mask per obstacle. Obstacles stay inside every
/// default pitch crop and below the default roll band in disparity; cutouts
/// sit 120 to 180 rows below the horizon near the image center.
Dataset make_synthetic_dataset(const SyntheticParams& params);

}  // namespace depthprobe
