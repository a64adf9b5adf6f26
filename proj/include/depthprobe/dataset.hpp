#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "depthprobe/disparity.hpp"
#include "depthprobe/geometry.hpp"
#include "depthprobe/imgsynth.hpp"
#include "depthprobe/oracle.hpp"

namespace depthprobe {

struct SceneObstacle {
  std::string id;
  /// Aligned to the scene image.
  Mask mask;
};

struct SceneImage {
  std::string id;
  ImageBuffer image;
  /// Known scene geometry; required by the built-in oracle endpoints.
  std::optional<OracleSpec> scene;
  std::optional<double> true_horizon_y;
  std::optional<DisparityMap> gt;
  std::optional<SemanticMap> semantic;
  std::vector<SceneObstacle> obstacles;
};

struct Dataset {
  CameraModel camera;
  std::vector<SceneImage> images;
  std::vector<ObjectCutout> cutouts;
  std::optional<ClassColorTable> class_colors;

  const SceneImage* find(const std::string& id) const;
  /// Class colors from the dataset if present, else averaged over every
  /// image with a semantic map. Empty when neither is available.
  ClassColorTable effective_class_colors() const;
};

/// On-disk layout below a dataset root:
///   camera.json                     optional camera model
///   class_colors.json               optional {"<label>": [r, g, b]}
///   images/<id>.png                 8-bit RGB frames (required)
///   scenes/<id>.json                optional oracle scene description
///   cutouts/<name>.json + sprites   cutout sidecars referencing their PNGs
///   semantic/<id>.png               optional paletted label maps
///   gt/<id>.json [+ <id>.png]       optional horizon and disparity truth
///   obstacles/<id>/<name>.png       optional obstacle masks
struct DatasetLayout {
  std::filesystem::path root;
  std::filesystem::path images_dir;
  std::filesystem::path cutouts_dir;
  std::filesystem::path scenes_dir;
  std::filesystem::path semantic_dir;
  std::filesystem::path gt_dir;
  std::filesystem::path obstacles_dir;

  static DatasetLayout under(const std::filesystem::path& root);
  /// $DEPTHPROBE_DATASET, or ConfigError if unset.
  static DatasetLayout from_env();
};

/// Reads a dataset. Throws ConfigError or IoError when the layout's
/// invariants do not hold (no images, dangling sprite references, masks of
/// the wrong size).
Dataset load_dataset(const DatasetLayout& layout);

/// Writes `dataset` in the layout above.
void save_dataset(const Dataset& dataset, const std::filesystem::path& root);

/// Ground truth disparity file pair. A sidecar with "d_max" means the wire
/// encoding; without it the PNG holds disparity in pixels times 256 with 0
/// marking invalid pixels.
DisparityMap read_gt_disparity(const std::filesystem::path& png, const std::filesystem::path& sidecar,
                               const CameraModel& camera);

}  // namespace depthprobe
