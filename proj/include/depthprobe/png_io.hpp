#pragma once

#include <cstdint>
#include <filesystem>
#include <map>

#include "depthprobe/imgsynth.hpp"
#include "depthprobe/raster.hpp"

namespace depthprobe {

using Gray16Image = Raster<std::uint16_t>;

struct PngInfo {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  /// libpng color type (PNG_COLOR_TYPE_*).
  int color_type = 0;
};

/// Header only. Throws IoError if the file is missing or not a PNG.
PngInfo read_png_info(const std::filesystem::path& path);

/// Any 8-bit or 16-bit PNG, converted to 8-bit RGB.
ImageBuffer read_png_rgb(const std::filesystem::path& path);
void write_png_rgb(const std::filesystem::path& path, const ImageBuffer& image);

/// Any PNG converted to 8-bit RGBA (opaque if the file has no alpha).
SpriteImage read_png_rgba(const std::filesystem::path& path);
void write_png_rgba(const std::filesystem::path& path, const SpriteImage& image);

/// 16-bit single-channel PNG, bit exact. Throws IoError on any other format.
Gray16Image read_png_gray16(const std::filesystem::path& path);
void write_png_gray16(const std::filesystem::path& path, const Gray16Image& image);

/// Masks are stored as 8-bit grayscale, 0 or 255; any nonzero value reads as set.
Mask read_png_mask(const std::filesystem::path& path);
void write_png_mask(const std::filesystem::path& path, const Mask& mask);

/// Paletted PNG: pixel indices are labels, the PLTE chunk is the palette.
SemanticMap read_png_semantic(const std::filesystem::path& path);
void write_png_semantic(const std::filesystem::path& path, const SemanticMap& map);

}  // namespace depthprobe
