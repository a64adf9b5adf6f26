#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "depthprobe/geometry.hpp"
#include "depthprobe/raster.hpp"

namespace depthprobe {

/// An object sprite cropped from a source frame. All centered coordinates
/// are relative to the geometric center of that frame.
struct ObjectCutout {
  SpriteImage sprite;
  /// Centered position of sprite pixel (0, 0) in the source frame.
  CenteredCoord sprite_origin;
  CenteredCoord ground_contact;
  std::string source_id;
  std::string class_label;
  std::vector<std::string> placement_slots;
  /// Same size as `sprite`; marks the flat patch disparity is averaged over.
  Mask measure_mask;

  /// Pixels with nonzero alpha.
  Mask alpha_support() const;
  /// Throws DomainError if the contact or measurement mask is inconsistent
  /// with the sprite.
  void validate() const;
};

enum class PlacementMode { PositionAndScale, PositionOnly, ScaleOnly };
enum class PhotometricMode { Unmodified, Grayscale, FalseColors, ClassAverageColors, SemanticRgb };

std::string_view to_string(PlacementMode mode);
std::string_view to_string(PhotometricMode mode);
PlacementMode parse_placement_mode(std::string_view name);
PhotometricMode parse_photometric_mode(std::string_view name);

struct PasteResult {
  ImageBuffer image;
  /// Transformed measurement mask, aligned to `image`.
  Mask measure_mask;
  /// Transformed alpha support (alpha >= 50%), aligned to `image`.
  Mask support;
  /// Ground contact actually used after snapping to the pixel grid.
  CenteredCoord contact;
  double scale = 1.0;
};

/// Composites `cutout` over `background` as if moved to `rel_dist` times its
/// original distance. The mode decides whether position, scale or both follow
/// the flat-ground placement; the frozen quantity keeps its r = 1 value.
///
/// The sprite's translation is snapped to whole pixels (nearest, ties toward
/// larger x and y), so the contact never lands more than half a pixel from
/// the analytic value and r = 1 reproduces a plain alpha paste bit for bit.
PasteResult paste_object(const ImageBuffer& background, const ObjectCutout& cutout,
                         PlacementMode mode, double rel_dist, double horizon_y);

/// Crop dimensions for a fractional window. Each dimension keeps the parity of
/// the frame so the crop center coincides with a shifted frame center.
struct CropSize {
  int width = 0;
  int height = 0;
};
CropSize crop_size(int frame_w, int frame_h, double h_frac, double w_frac);

inline constexpr double kPitchCropHeightFrac = 0.80;
inline constexpr double kPitchCropWidthFrac = 0.95;
inline constexpr double kRollCropHeightFrac = 0.75;
inline constexpr double kRollCropWidthFrac = 0.75;

/// Window whose center sits `offset_px` rows below the frame center.
Rect pitch_window(int frame_w, int frame_h, int offset_px, double h_frac = kPitchCropHeightFrac,
                  double w_frac = kPitchCropWidthFrac);

template <class T>
Raster<T> crop_pitch(const Raster<T>& image, int offset_px, double h_frac = kPitchCropHeightFrac,
                     double w_frac = kPitchCropWidthFrac) {
  return crop(image, pitch_window(image.width(), image.height(), offset_px, h_frac, w_frac));
}

/// Bilinear sample of a window rotated by `angle_deg` about the frame center.
/// Crop pixel u (centered) reads source position R(angle) * u; a horizontal
/// line in the source therefore appears at -angle in the crop.
ImageBuffer crop_roll(const ImageBuffer& image, double angle_deg,
                      double h_frac = kRollCropHeightFrac, double w_frac = kRollCropWidthFrac);
/// Nearest-neighbour variant for masks.
Mask crop_roll_mask(const Mask& mask, double angle_deg, double h_frac = kRollCropHeightFrac,
                    double w_frac = kRollCropWidthFrac);

/// Label raster plus its color palette (the semantic "rgb" rendering).
struct SemanticMap {
  LabelMap labels;
  std::map<std::uint8_t, Rgb> palette;
  std::map<std::uint8_t, std::string> names;

  /// Throws ConfigError for labels absent from the palette.
  ImageBuffer colorize() const;
};

using ClassColorTable = std::map<std::uint8_t, Rgb>;

/// Running per-class mean color over any number of labelled images.
class ClassColorAccumulator {
 public:
  void add(const ImageBuffer& image, const LabelMap& labels);
  ClassColorTable table() const;

 private:
  struct Sum {
    std::uint64_t r = 0, g = 0, b = 0, n = 0;
  };
  std::map<std::uint8_t, Sum> sums_;
};

ImageBuffer apply_photometric(const ImageBuffer& image, PhotometricMode mode,
                              const SemanticMap* semantic = nullptr,
                              const ClassColorTable* class_colors = nullptr);

/// Integer luma, (299 R + 587 G + 114 B) / 1000 rounded.
std::uint8_t luminance(Rgb c);

enum class ShadowFalloff { Linear, Constant };

struct ShadowParams {
  double darken_frac = 0.6;
  int height_px = 8;
  ShadowFalloff falloff = ShadowFalloff::Linear;
};

/// Darkens a strip of `height_px` rows directly below `contact_box`. Row k of
/// the strip is scaled by 1 - darken_frac * falloff(k) and floored.
ImageBuffer add_shadow(const ImageBuffer& image, const Rect& contact_box, const ShadowParams& params);

using ShapeFill = std::variant<Rgb, ImageBuffer>;

struct ShapeResult {
  ImageBuffer image;
  Mask mask;
  /// Lowest vertex of the polygon.
  CenteredCoord ground_contact;
};

/// Fills a simple polygon. Texture fills are tiled from the polygon's
/// bounding-box corner.
ShapeResult paste_shape(const ImageBuffer& image, const std::vector<CenteredCoord>& polygon,
                        const ShapeFill& fill);

enum class SpritePart { Bottom, Left, Right, Top, Interior };

std::string_view to_string(SpritePart part);
SpritePart parse_sprite_part(std::string_view name);

/// Support pixels belonging to `part`. Edge parts are the pixels within
/// `band_px` of the support boundary in that direction; Interior is the rest.
Mask sprite_part_mask(const ObjectCutout& cutout, SpritePart part, int band_px);

/// Pastes only the selected parts of the sprite at its original location.
PasteResult edge_ablation(const ImageBuffer& image, const ObjectCutout& cutout,
                          const std::set<SpritePart>& keep, int band_px);

template <class T>
Raster<T> flip_vertical(const Raster<T>& image) {
  Raster<T> out(image.width(), image.height());
  for (int r = 0; r < image.height(); ++r) {
    const auto src = image.row(image.height() - 1 - r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

/// Pastes `cutout` at its original centered position and scale onto a
/// different background. Throws PlacementError if `slot` is not one of the
/// cutout's placement slots.
PasteResult context_swap(const ObjectCutout& cutout, const ImageBuffer& new_background,
                         const std::string& slot);

}  // namespace depthprobe
