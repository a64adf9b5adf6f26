#include "depthprobe/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <vector>

namespace depthprobe {

namespace {

// libpng reports failures by longjmp. Everything that can be skipped by the
// jump lives in these POD-only helpers; buffers are allocated by the caller.
struct ErrorSlot {
  char message[256] = {0};
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* slot = static_cast<ErrorSlot*>(png_get_error_ptr(png));
  if (slot != nullptr) std::snprintf(slot->message, sizeof slot->message, "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

enum class Target { Rgb8, Rgba8, Gray16, Indexed };

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path) {
    fp_ = std::fopen(path.c_str(), "rb");
    if (fp_ == nullptr) throw IoError(path.string(), "cannot open for reading");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp_) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
      std::fclose(fp_);
      throw IoError(path.string(), "not a PNG file");
    }
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err_, on_png_error, on_png_warning);
    info_ = png_ ? png_create_info_struct(png_) : nullptr;
    if (png_ == nullptr || info_ == nullptr) {
      if (png_) png_destroy_read_struct(&png_, nullptr, nullptr);
      std::fclose(fp_);
      throw IoError(path.string(), "libpng initialisation failed");
    }
    if (!read_header()) {
      const std::string msg = err_.message;
      png_destroy_read_struct(&png_, &info_, nullptr);
      std::fclose(fp_);
      throw IoError(path.string(), "PNG decode failed: " + msg);
    }
  }
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;
  ~Reader() {
    png_destroy_read_struct(&png_, &info_, nullptr);
    std::fclose(fp_);
  }

  PngInfo info() const { return info_copy_; }

  void configure(Target t) {
    const int ct = info_copy_.color_type;
    const int depth = info_copy_.bit_depth;
    switch (t) {
      case Target::Rgb8:
        if (depth == 16) png_set_strip_16(png_);
        if (ct == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png_);
        if (ct == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png_);
        if (ct == PNG_COLOR_TYPE_GRAY || ct == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png_);
        if (ct & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png_);
        break;
      case Target::Rgba8:
        if (depth == 16) png_set_strip_16(png_);
        if (ct == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png_);
        if (ct == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png_);
        if (png_get_valid(png_, info_, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png_);
        if (ct == PNG_COLOR_TYPE_GRAY || ct == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png_);
        if (!(ct & PNG_COLOR_MASK_ALPHA) && !png_get_valid(png_, info_, PNG_INFO_tRNS)) {
          png_set_filler(png_, 0xFF, PNG_FILLER_AFTER);
        }
        break;
      case Target::Gray16:
        if (ct != PNG_COLOR_TYPE_GRAY || depth != 16) {
          throw IoError(path_.string(), "expected a 16-bit grayscale PNG (got color type " +
                                            std::to_string(ct) + ", bit depth " + std::to_string(depth) + ")");
        }
        png_set_swap(png_);
        break;
      case Target::Indexed:
        if (ct != PNG_COLOR_TYPE_PALETTE) throw IoError(path_.string(), "expected a paletted PNG");
        if (depth < 8) png_set_packing(png_);
        break;
    }
    if (!update()) fail();
  }

  std::size_t rowbytes() const { return png_get_rowbytes(png_, info_); }

  void read_into(std::vector<unsigned char>& buf) {
    const std::size_t stride = rowbytes();
    buf.assign(stride * static_cast<std::size_t>(info_copy_.height), 0);
    std::vector<png_bytep> rows(static_cast<std::size_t>(info_copy_.height));
    for (int r = 0; r < info_copy_.height; ++r) rows[r] = buf.data() + stride * r;
    if (!read_rows(rows.data())) fail();
  }

  std::vector<Rgb> palette() const {
    png_colorp pal = nullptr;
    int n = 0;
    std::vector<Rgb> out;
    if (png_get_PLTE(png_, info_, &pal, &n) == PNG_INFO_PLTE) {
      for (int i = 0; i < n; ++i) out.push_back({pal[i].red, pal[i].green, pal[i].blue});
    }
    return out;
  }

 private:
  bool read_header() {
    if (setjmp(png_jmpbuf(png_))) return false;
    png_init_io(png_, fp_);
    png_set_sig_bytes(png_, 8);
    png_read_info(png_, info_);
    info_copy_.width = static_cast<int>(png_get_image_width(png_, info_));
    info_copy_.height = static_cast<int>(png_get_image_height(png_, info_));
    info_copy_.bit_depth = png_get_bit_depth(png_, info_);
    info_copy_.color_type = png_get_color_type(png_, info_);
    return true;
  }

  bool update() {
    if (setjmp(png_jmpbuf(png_))) return false;
    png_read_update_info(png_, info_);
    return true;
  }

  bool read_rows(png_bytepp rows) {
    if (setjmp(png_jmpbuf(png_))) return false;
    png_read_image(png_, rows);
    png_read_end(png_, nullptr);
    return true;
  }

  [[noreturn]] void fail() { throw IoError(path_.string(), std::string("PNG decode failed: ") + err_.message); }

  std::filesystem::path path_;
  std::FILE* fp_ = nullptr;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
  ErrorSlot err_;
  PngInfo info_copy_;
};

struct WriteSpec {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  int color_type = PNG_COLOR_TYPE_RGB;
  const std::vector<Rgb>* palette = nullptr;
  bool swap16 = false;
};

bool write_rows(png_structp png, png_infop info, std::FILE* fp, const WriteSpec& spec, png_bytepp rows,
                png_colorp pal, int n_pal) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(spec.width), static_cast<png_uint_32>(spec.height),
               spec.bit_depth, spec.color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (pal != nullptr) png_set_PLTE(png, info, pal, n_pal);
  png_write_info(png, info);
  if (spec.swap16) png_set_swap(png);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

void write_png(const std::filesystem::path& path, const WriteSpec& spec, const unsigned char* data,
               std::size_t stride) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw IoError(path.string(), "cannot open for writing");
  ErrorSlot err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    if (png) png_destroy_write_struct(&png, nullptr);
    std::fclose(fp);
    throw IoError(path.string(), "libpng initialisation failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(spec.height));
  for (int r = 0; r < spec.height; ++r) {
    rows[r] = const_cast<png_bytep>(data + stride * static_cast<std::size_t>(r));
  }
  std::vector<png_color> pal;
  if (spec.palette != nullptr) {
    for (const Rgb& c : *spec.palette) pal.push_back({c.r, c.g, c.b});
  }
  const bool ok = write_rows(png, info, fp, spec, rows.data(), pal.empty() ? nullptr : pal.data(),
                             static_cast<int>(pal.size()));
  png_destroy_write_struct(&png, &info);
  const bool closed = std::fclose(fp) == 0;
  if (!ok) throw IoError(path.string(), std::string("PNG encode failed: ") + err.message);
  if (!closed) throw IoError(path.string(), "write failed");
}

}  // namespace

PngInfo read_png_info(const std::filesystem::path& path) { return Reader(path).info(); }

ImageBuffer read_png_rgb(const std::filesystem::path& path) {
  Reader rd(path);
  rd.configure(Target::Rgb8);
  std::vector<unsigned char> buf;
  rd.read_into(buf);
  const auto info = rd.info();
  ImageBuffer out(info.width, info.height);
  const std::size_t stride = rd.rowbytes();
  for (int r = 0; r < info.height; ++r) {
    const unsigned char* row = buf.data() + stride * r;
    for (int c = 0; c < info.width; ++c) out.at(c, r) = {row[3 * c], row[3 * c + 1], row[3 * c + 2]};
  }
  return out;
}

void write_png_rgb(const std::filesystem::path& path, const ImageBuffer& image) {
  static_assert(sizeof(Rgb) == 3);
  WriteSpec spec{image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB};
  write_png(path, spec, reinterpret_cast<const unsigned char*>(image.pixels().data()),
            3 * static_cast<std::size_t>(image.width()));
}

SpriteImage read_png_rgba(const std::filesystem::path& path) {
  Reader rd(path);
  rd.configure(Target::Rgba8);
  std::vector<unsigned char> buf;
  rd.read_into(buf);
  const auto info = rd.info();
  SpriteImage out(info.width, info.height);
  const std::size_t stride = rd.rowbytes();
  for (int r = 0; r < info.height; ++r) {
    const unsigned char* row = buf.data() + stride * r;
    for (int c = 0; c < info.width; ++c) {
      out.at(c, r) = {row[4 * c], row[4 * c + 1], row[4 * c + 2], row[4 * c + 3]};
    }
  }
  return out;
}

void write_png_rgba(const std::filesystem::path& path, const SpriteImage& image) {
  static_assert(sizeof(Rgba) == 4);
  WriteSpec spec{image.width(), image.height(), 8, PNG_COLOR_TYPE_RGBA};
  write_png(path, spec, reinterpret_cast<const unsigned char*>(image.pixels().data()),
            4 * static_cast<std::size_t>(image.width()));
}

Gray16Image read_png_gray16(const std::filesystem::path& path) {
  Reader rd(path);
  rd.configure(Target::Gray16);
  std::vector<unsigned char> buf;
  rd.read_into(buf);
  const auto info = rd.info();
  Gray16Image out(info.width, info.height);
  const std::size_t stride = rd.rowbytes();
  for (int r = 0; r < info.height; ++r) {
    std::memcpy(out.row(r).data(), buf.data() + stride * r, 2 * static_cast<std::size_t>(info.width));
  }
  return out;
}

void write_png_gray16(const std::filesystem::path& path, const Gray16Image& image) {
  WriteSpec spec{image.width(), image.height(), 16, PNG_COLOR_TYPE_GRAY};
  spec.swap16 = true;
  write_png(path, spec, reinterpret_cast<const unsigned char*>(image.pixels().data()),
            2 * static_cast<std::size_t>(image.width()));
}

Mask read_png_mask(const std::filesystem::path& path) {
  const ImageBuffer rgb = read_png_rgb(path);
  Mask out(rgb.width(), rgb.height(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Rgb& px = rgb.pixels()[i];
    out.pixels()[i] = (px.r | px.g | px.b) != 0 ? 1 : 0;
  }
  return out;
}

void write_png_mask(const std::filesystem::path& path, const Mask& mask) {
  std::vector<unsigned char> bytes(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) bytes[i] = mask.pixels()[i] ? 255 : 0;
  WriteSpec spec{mask.width(), mask.height(), 8, PNG_COLOR_TYPE_GRAY};
  write_png(path, spec, bytes.data(), static_cast<std::size_t>(mask.width()));
}

SemanticMap read_png_semantic(const std::filesystem::path& path) {
  Reader rd(path);
  rd.configure(Target::Indexed);
  std::vector<unsigned char> buf;
  rd.read_into(buf);
  const auto info = rd.info();
  SemanticMap out;
  out.labels = LabelMap(info.width, info.height);
  const std::size_t stride = rd.rowbytes();
  for (int r = 0; r < info.height; ++r) {
    std::memcpy(out.labels.row(r).data(), buf.data() + stride * r, static_cast<std::size_t>(info.width));
  }
  const auto pal = rd.palette();
  for (std::size_t i = 0; i < pal.size(); ++i) out.palette[static_cast<std::uint8_t>(i)] = pal[i];
  return out;
}

void write_png_semantic(const std::filesystem::path& path, const SemanticMap& map) {
  int max_label = 0;
  for (auto v : map.labels.pixels()) max_label = std::max<int>(max_label, v);
  for (const auto& [label, color] : map.palette) max_label = std::max<int>(max_label, label);
  std::vector<Rgb> pal(static_cast<std::size_t>(max_label) + 1);
  for (const auto& [label, color] : map.palette) pal[label] = color;
  WriteSpec spec{map.labels.width(), map.labels.height(), 8, PNG_COLOR_TYPE_PALETTE};
  spec.palette = &pal;
  write_png(path, spec, map.labels.pixels().data(), static_cast<std::size_t>(map.labels.width()));
}

}  // namespace depthprobe
