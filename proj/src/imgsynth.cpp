#include "depthprobe/imgsynth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace depthprobe {

namespace {

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
}

double snap(double v) { return std::floor(v + 0.5); }

struct SpriteSample {
  double premult[3] = {0.0, 0.0, 0.0};  // sum of w * alpha * channel
  double alpha = 0.0;                   // sum of w * alpha, 0..255
  double mask = 0.0;                    // measurement mask coverage, 0..1
};

// Bilinear sample with pixels outside the sprite treated as transparent.
SpriteSample sample_sprite(const SpriteImage& sprite, const Mask& measure, double u, double v) {
  SpriteSample s;
  const int c0 = static_cast<int>(std::floor(u));
  const int r0 = static_cast<int>(std::floor(v));
  const double fu = u - c0;
  const double fv = v - r0;
  const std::array<std::array<double, 3>, 4> taps = {{
      {static_cast<double>(c0), static_cast<double>(r0), (1 - fu) * (1 - fv)},
      {static_cast<double>(c0 + 1), static_cast<double>(r0), fu * (1 - fv)},
      {static_cast<double>(c0), static_cast<double>(r0 + 1), (1 - fu) * fv},
      {static_cast<double>(c0 + 1), static_cast<double>(r0 + 1), fu * fv},
  }};
  for (const auto& t : taps) {
    const double w = t[2];
    if (w == 0.0) continue;
    const int c = static_cast<int>(t[0]);
    const int r = static_cast<int>(t[1]);
    if (!sprite.contains(c, r)) continue;
    const Rgba& px = sprite.at(c, r);
    const double wa = w * px.a;
    s.premult[0] += wa * px.r;
    s.premult[1] += wa * px.g;
    s.premult[2] += wa * px.b;
    s.alpha += wa;
    if (px.a != 0 && measure.at(c, r)) s.mask += w;
  }
  return s;
}

std::uint8_t blend(double premult, double alpha, std::uint8_t bg) {
  return clamp_u8((premult + (255.0 - alpha) * bg) / 255.0);
}

}  // namespace

Mask ObjectCutout::alpha_support() const {
  Mask out(sprite.width(), sprite.height(), 0);
  for (int r = 0; r < sprite.height(); ++r) {
    for (int c = 0; c < sprite.width(); ++c) out.at(c, r) = sprite.at(c, r).a != 0 ? 1 : 0;
  }
  return out;
}

void ObjectCutout::validate() const {
  if (sprite.empty()) throw DomainError("cutout has no sprite");
  const auto bounds = mask_bounds(alpha_support());
  if (!bounds) throw DomainError("invalid cutout '" + source_id + "': empty alpha support");
  const double bottom_y = sprite_origin.y + bounds->bottom() - 1;
  if (std::abs(ground_contact.y - bottom_y) > 2.0) {
    throw DomainError("cutout ground contact is not on the bottom edge of its alpha support");
  }
  const double left_x = sprite_origin.x + bounds->col;
  const double right_x = sprite_origin.x + bounds->right() - 1;
  if (ground_contact.x < left_x - 2.0 || ground_contact.x > right_x + 2.0) {
    throw DomainError("cutout ground contact lies outside the sprite's horizontal extent");
  }
  if (measure_mask.width() != sprite.width() || measure_mask.height() != sprite.height()) {
    throw DomainError("measurement mask size differs from sprite");
  }
  for (int r = 0; r < sprite.height(); ++r) {
    for (int c = 0; c < sprite.width(); ++c) {
      if (measure_mask.at(c, r) && sprite.at(c, r).a == 0) {
        throw DomainError("measurement mask extends outside the alpha support");
      }
    }
  }
}

std::string_view to_string(PlacementMode mode) {
  switch (mode) {
    case PlacementMode::PositionAndScale: return "PositionAndScale";
    case PlacementMode::PositionOnly: return "PositionOnly";
    case PlacementMode::ScaleOnly: return "ScaleOnly";
  }
  return "?";
}

std::string_view to_string(PhotometricMode mode) {
  switch (mode) {
    case PhotometricMode::Unmodified: return "Unmodified";
    case PhotometricMode::Grayscale: return "Grayscale";
    case PhotometricMode::FalseColors: return "FalseColors";
    case PhotometricMode::ClassAverageColors: return "ClassAverageColors";
    case PhotometricMode::SemanticRgb: return "SemanticRgb";
  }
  return "?";
}

PlacementMode parse_placement_mode(std::string_view name) {
  for (auto m : {PlacementMode::PositionAndScale, PlacementMode::PositionOnly, PlacementMode::ScaleOnly}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown placement mode '" + std::string(name) + "'");
}

PhotometricMode parse_photometric_mode(std::string_view name) {
  for (auto m : {PhotometricMode::Unmodified, PhotometricMode::Grayscale, PhotometricMode::FalseColors,
                 PhotometricMode::ClassAverageColors, PhotometricMode::SemanticRgb}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown photometric mode '" + std::string(name) + "'");
}

PasteResult paste_object(const ImageBuffer& background, const ObjectCutout& cutout,
                         PlacementMode mode, double rel_dist, double horizon_y) {
  const Mask support = cutout.alpha_support();
  const auto bounds = mask_bounds(support);
  if (!bounds) throw DomainError("invalid cutout '" + cutout.source_id + "': empty alpha support");

  const Placement placed = place_at_relative_distance(cutout.ground_contact, horizon_y, rel_dist);
  double scale = placed.scale;
  CenteredCoord contact = placed.contact;
  if (mode == PlacementMode::PositionOnly) scale = 1.0;
  if (mode == PlacementMode::ScaleOnly) contact = cutout.ground_contact;

  const PixelCoord center = image_center(background.width(), background.height());
  // Contact in sprite pixel coordinates.
  const double su = cutout.ground_contact.x - cutout.sprite_origin.x;
  const double sv = cutout.ground_contact.y - cutout.sprite_origin.y;
  // Whole-pixel shift from sprite to destination coordinates at the contact.
  const double shift_c = snap(contact.x + center.col - su);
  const double shift_r = snap(contact.y + center.row - sv);
  const double dest_c = su + shift_c;
  const double dest_r = sv + shift_r;

  auto to_dest_c = [&](double u) { return dest_c + scale * (u - su); };
  auto to_dest_r = [&](double v) { return dest_r + scale * (v - sv); };
  const double sup_c0 = to_dest_c(bounds->col), sup_c1 = to_dest_c(bounds->right() - 1);
  const double sup_r0 = to_dest_r(bounds->row), sup_r1 = to_dest_r(bounds->bottom() - 1);
  if (sup_c0 < -0.5 || sup_r0 < -0.5 || sup_c1 > background.width() - 0.5 ||
      sup_r1 > background.height() - 0.5) {
    throw PlacementError("placed object '" + cutout.source_id + "' extends outside the frame");
  }

  PasteResult out{background, Mask(background.width(), background.height(), 0),
                  Mask(background.width(), background.height(), 0),
                  to_centered({dest_c, dest_r}, center), scale};

  const int c_lo = std::max(0, static_cast<int>(std::ceil(to_dest_c(0.0))));
  const int c_hi = std::min(background.width() - 1,
                            static_cast<int>(std::floor(to_dest_c(cutout.sprite.width() - 1.0))));
  const int r_lo = std::max(0, static_cast<int>(std::ceil(to_dest_r(0.0))));
  const int r_hi = std::min(background.height() - 1,
                            static_cast<int>(std::floor(to_dest_r(cutout.sprite.height() - 1.0))));
  for (int r = r_lo; r <= r_hi; ++r) {
    const double v = scale == 1.0 ? r - shift_r : sv + (r - dest_r) / scale;
    for (int c = c_lo; c <= c_hi; ++c) {
      const double u = scale == 1.0 ? c - shift_c : su + (c - dest_c) / scale;
      const SpriteSample s = sample_sprite(cutout.sprite, cutout.measure_mask, u, v);
      if (s.alpha <= 0.0) continue;
      Rgb& px = out.image.at(c, r);
      px.r = blend(s.premult[0], s.alpha, px.r);
      px.g = blend(s.premult[1], s.alpha, px.g);
      px.b = blend(s.premult[2], s.alpha, px.b);
      if (2.0 * s.alpha >= 255.0) {
        out.support.at(c, r) = 1;
        if (2.0 * s.mask >= 1.0) out.measure_mask.at(c, r) = 1;
      }
    }
  }
  return out;
}

CropSize crop_size(int frame_w, int frame_h, double h_frac, double w_frac) {
  if (!(h_frac > 0.0 && h_frac <= 1.0 && w_frac > 0.0 && w_frac <= 1.0)) {
    throw CropError("crop fractions must lie in (0, 1]");
  }
  auto fit = [](int n, double frac) {
    int m = static_cast<int>(std::lround(frac * n));
    if ((n - m) % 2 != 0) --m;
    return m;
  };
  CropSize s{fit(frame_w, w_frac), fit(frame_h, h_frac)};
  if (s.width <= 0 || s.height <= 0) throw CropError("crop window is empty");
  return s;
}

Rect pitch_window(int frame_w, int frame_h, int offset_px, double h_frac, double w_frac) {
  const CropSize s = crop_size(frame_w, frame_h, h_frac, w_frac);
  Rect w{(frame_w - s.width) / 2, (frame_h - s.height) / 2 + offset_px, s.width, s.height};
  if (!w.inside(frame_w, frame_h)) {
    throw CropError("pitch crop with offset " + std::to_string(offset_px) + " leaves the frame");
  }
  return w;
}

namespace {

struct RollGeometry {
  CropSize size;
  PixelCoord src_center;
  PixelCoord dst_center;
  double cos_a = 1.0;
  double sin_a = 0.0;

  PixelCoord source_of(int c, int r) const {
    const double u = c - dst_center.col;
    const double v = r - dst_center.row;
    return {src_center.col + cos_a * u - sin_a * v, src_center.row + sin_a * u + cos_a * v};
  }
};

RollGeometry roll_geometry(int frame_w, int frame_h, double angle_deg, double h_frac, double w_frac) {
  if (!std::isfinite(angle_deg) || std::abs(angle_deg) > 45.0) {
    throw CropError("roll angle out of range");
  }
  RollGeometry g;
  g.size = crop_size(frame_w, frame_h, h_frac, w_frac);
  g.src_center = image_center(frame_w, frame_h);
  g.dst_center = image_center(g.size.width, g.size.height);
  if (angle_deg != 0.0) {
    const double a = angle_deg * std::numbers::pi / 180.0;
    g.cos_a = std::cos(a);
    g.sin_a = std::sin(a);
  }
  for (int c : {0, g.size.width - 1}) {
    for (int r : {0, g.size.height - 1}) {
      const PixelCoord p = g.source_of(c, r);
      if (p.col < 0.0 || p.row < 0.0 || p.col > frame_w - 1.0 || p.row > frame_h - 1.0) {
        throw CropError("rotated crop window leaves the frame");
      }
    }
  }
  return g;
}

}  // namespace

ImageBuffer crop_roll(const ImageBuffer& image, double angle_deg, double h_frac, double w_frac) {
  const RollGeometry g = roll_geometry(image.width(), image.height(), angle_deg, h_frac, w_frac);
  ImageBuffer out(g.size.width, g.size.height);
  const int max_c = image.width() - 1;
  const int max_r = image.height() - 1;
  for (int r = 0; r < g.size.height; ++r) {
    for (int c = 0; c < g.size.width; ++c) {
      const PixelCoord p = g.source_of(c, r);
      const int c0 = std::clamp(static_cast<int>(std::floor(p.col)), 0, max_c);
      const int r0 = std::clamp(static_cast<int>(std::floor(p.row)), 0, max_r);
      const int c1 = std::min(c0 + 1, max_c);
      const int r1 = std::min(r0 + 1, max_r);
      const double fu = p.col - c0;
      const double fv = p.row - r0;
      auto lerp = [&](auto channel) {
        const double top = (1 - fu) * channel(image.at(c0, r0)) + fu * channel(image.at(c1, r0));
        const double bot = (1 - fu) * channel(image.at(c0, r1)) + fu * channel(image.at(c1, r1));
        return clamp_u8((1 - fv) * top + fv * bot);
      };
      out.at(c, r) = {lerp([](const Rgb& px) { return px.r; }), lerp([](const Rgb& px) { return px.g; }),
                      lerp([](const Rgb& px) { return px.b; })};
    }
  }
  return out;
}

Mask crop_roll_mask(const Mask& mask, double angle_deg, double h_frac, double w_frac) {
  const RollGeometry g = roll_geometry(mask.width(), mask.height(), angle_deg, h_frac, w_frac);
  Mask out(g.size.width, g.size.height, 0);
  for (int r = 0; r < g.size.height; ++r) {
    for (int c = 0; c < g.size.width; ++c) {
      const PixelCoord p = g.source_of(c, r);
      const int sc = std::clamp(static_cast<int>(std::lround(p.col)), 0, mask.width() - 1);
      const int sr = std::clamp(static_cast<int>(std::lround(p.row)), 0, mask.height() - 1);
      out.at(c, r) = mask.at(sc, sr);
    }
  }
  return out;
}

ImageBuffer SemanticMap::colorize() const {
  ImageBuffer out(labels.width(), labels.height());
  for (int r = 0; r < labels.height(); ++r) {
    for (int c = 0; c < labels.width(); ++c) {
      const auto it = palette.find(labels.at(c, r));
      if (it == palette.end()) {
        throw ConfigError("semantic label " + std::to_string(labels.at(c, r)) + " has no palette color");
      }
      out.at(c, r) = it->second;
    }
  }
  return out;
}

void ClassColorAccumulator::add(const ImageBuffer& image, const LabelMap& labels) {
  if (image.width() != labels.width() || image.height() != labels.height()) {
    throw DomainError("label map does not match image size");
  }
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      Sum& s = sums_[labels.at(c, r)];
      const Rgb& px = image.at(c, r);
      s.r += px.r;
      s.g += px.g;
      s.b += px.b;
      ++s.n;
    }
  }
}

ClassColorTable ClassColorAccumulator::table() const {
  ClassColorTable out;
  for (const auto& [label, s] : sums_) {
    const double n = static_cast<double>(s.n);
    out[label] = {clamp_u8(s.r / n), clamp_u8(s.g / n), clamp_u8(s.b / n)};
  }
  return out;
}

std::uint8_t luminance(Rgb c) {
  return static_cast<std::uint8_t>((299u * c.r + 587u * c.g + 114u * c.b + 500u) / 1000u);
}

namespace {

struct HueSat {
  double hue = 0.0;  // [0, 6)
  double sat = 0.0;  // [0, 1]
};

HueSat hue_saturation(Rgb c) {
  const int mx = std::max({c.r, c.g, c.b});
  const int mn = std::min({c.r, c.g, c.b});
  HueSat hs;
  if (mx == 0 || mx == mn) return hs;
  const double delta = mx - mn;
  hs.sat = delta / mx;
  if (mx == c.r) {
    hs.hue = (c.g - c.b) / delta;
  } else if (mx == c.g) {
    hs.hue = 2.0 + (c.b - c.r) / delta;
  } else {
    hs.hue = 4.0 + (c.r - c.g) / delta;
  }
  if (hs.hue < 0.0) hs.hue += 6.0;
  return hs;
}

// The maximum channel is always exactly `value`.
Rgb from_hsv(HueSat hs, std::uint8_t value) {
  if (hs.sat == 0.0) return {value, value, value};
  const int sector = std::min(5, static_cast<int>(std::floor(hs.hue)));
  const double f = hs.hue - sector;
  const double v = value;
  const std::uint8_t p = clamp_u8(v * (1.0 - hs.sat));
  const std::uint8_t q = clamp_u8(v * (1.0 - hs.sat * f));
  const std::uint8_t t = clamp_u8(v * (1.0 - hs.sat * (1.0 - f)));
  switch (sector) {
    case 0: return {value, t, p};
    case 1: return {q, value, p};
    case 2: return {p, value, t};
    case 3: return {p, q, value};
    case 4: return {t, p, value};
    default: return {value, p, q};
  }
}

const SemanticMap& require_semantic(const SemanticMap* semantic, const ImageBuffer& image,
                                    PhotometricMode mode) {
  if (semantic == nullptr) {
    throw ConfigError(std::string(to_string(mode)) + " requires a semantic map");
  }
  if (semantic->labels.width() != image.width() || semantic->labels.height() != image.height()) {
    throw ConfigError("semantic map does not match image size");
  }
  return *semantic;
}

}  // namespace

ImageBuffer apply_photometric(const ImageBuffer& image, PhotometricMode mode,
                              const SemanticMap* semantic, const ClassColorTable* class_colors) {
  switch (mode) {
    case PhotometricMode::Unmodified:
      return image;
    case PhotometricMode::Grayscale: {
      ImageBuffer out = image;
      for (Rgb& px : out.pixels()) {
        const auto y = luminance(px);
        px = {y, y, y};
      }
      return out;
    }
    case PhotometricMode::SemanticRgb:
      return require_semantic(semantic, image, mode).colorize();
    case PhotometricMode::FalseColors: {
      const ImageBuffer colors = require_semantic(semantic, image, mode).colorize();
      ImageBuffer out(image.width(), image.height());
      for (int r = 0; r < image.height(); ++r) {
        for (int c = 0; c < image.width(); ++c) {
          const Rgb& px = image.at(c, r);
          out.at(c, r) = from_hsv(hue_saturation(colors.at(c, r)), std::max({px.r, px.g, px.b}));
        }
      }
      return out;
    }
    case PhotometricMode::ClassAverageColors: {
      const SemanticMap& sem = require_semantic(semantic, image, mode);
      if (class_colors == nullptr) throw ConfigError("ClassAverageColors requires a class color table");
      ImageBuffer out(image.width(), image.height());
      for (int r = 0; r < image.height(); ++r) {
        for (int c = 0; c < image.width(); ++c) {
          const auto it = class_colors->find(sem.labels.at(c, r));
          if (it == class_colors->end()) {
            throw ConfigError("no class-average color for label " + std::to_string(sem.labels.at(c, r)));
          }
          out.at(c, r) = it->second;
        }
      }
      return out;
    }
  }
  throw ConfigError("unknown photometric mode");
}

ImageBuffer add_shadow(const ImageBuffer& image, const Rect& contact_box, const ShadowParams& params) {
  if (!contact_box.inside(image.width(), image.height())) {
    throw PlacementError("shadow contact box lies outside the frame");
  }
  if (!(params.darken_frac >= 0.0 && params.darken_frac <= 1.0)) {
    throw DomainError("darken_frac must lie in [0, 1]");
  }
  if (params.height_px <= 0) throw DomainError("shadow height must be positive");
  ImageBuffer out = image;
  for (int k = 0; k < params.height_px; ++k) {
    const int r = contact_box.bottom() + k;
    if (r >= image.height()) break;
    const double fall =
        params.falloff == ShadowFalloff::Linear ? 1.0 - static_cast<double>(k) / params.height_px : 1.0;
    const double gain = 1.0 - params.darken_frac * fall;
    for (int c = contact_box.col; c < contact_box.right(); ++c) {
      Rgb& px = out.at(c, r);
      auto dim = [gain](std::uint8_t v) {
        return static_cast<std::uint8_t>(std::max(0.0, std::floor(v * gain)));
      };
      px = {dim(px.r), dim(px.g), dim(px.b)};
    }
  }
  return out;
}

ShapeResult paste_shape(const ImageBuffer& image, const std::vector<CenteredCoord>& polygon,
                        const ShapeFill& fill) {
  if (polygon.size() < 3 || std::abs(polygon_area(polygon)) < 1e-9) {
    throw DomainError("degenerate polygon");
  }
  if (!polygon_is_simple(polygon)) throw DomainError("polygon is self-intersecting");
  const PixelCoord center = image_center(image.width(), image.height());
  double min_c = 1e300, min_r = 1e300;
  CenteredCoord lowest = polygon.front();
  for (const auto& v : polygon) {
    const PixelCoord p = to_pixel(v, center);
    if (p.col < -0.5 || p.row < -0.5 || p.col > image.width() - 0.5 || p.row > image.height() - 0.5) {
      throw PlacementError("polygon vertex outside the frame");
    }
    min_c = std::min(min_c, p.col);
    min_r = std::min(min_r, p.row);
    if (v.y > lowest.y) lowest = v;
  }
  ShapeResult out{image, polygon_mask(polygon, image.width(), image.height()), lowest};
  const int tc0 = static_cast<int>(std::floor(min_c));
  const int tr0 = static_cast<int>(std::floor(min_r));
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      if (!out.mask.at(c, r)) continue;
      if (const auto* solid = std::get_if<Rgb>(&fill)) {
        out.image.at(c, r) = *solid;
      } else {
        const auto& tex = std::get<ImageBuffer>(fill);
        if (tex.empty()) throw DomainError("empty texture fill");
        const int tc = ((c - tc0) % tex.width() + tex.width()) % tex.width();
        const int tr = ((r - tr0) % tex.height() + tex.height()) % tex.height();
        out.image.at(c, r) = tex.at(tc, tr);
      }
    }
  }
  return out;
}

std::string_view to_string(SpritePart part) {
  switch (part) {
    case SpritePart::Bottom: return "bottom";
    case SpritePart::Left: return "left";
    case SpritePart::Right: return "right";
    case SpritePart::Top: return "top";
    case SpritePart::Interior: return "interior";
  }
  return "?";
}

SpritePart parse_sprite_part(std::string_view name) {
  for (auto p : {SpritePart::Bottom, SpritePart::Left, SpritePart::Right, SpritePart::Top,
                 SpritePart::Interior}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown sprite part '" + std::string(name) + "'");
}

Mask sprite_part_mask(const ObjectCutout& cutout, SpritePart part, int band_px) {
  const Mask support = cutout.alpha_support();
  const auto bounds = mask_bounds(support);
  if (!bounds) throw DomainError("invalid cutout '" + cutout.source_id + "': empty alpha support");
  if (band_px < 1 || band_px > std::min(bounds->width, bounds->height)) {
    throw DomainError("edge band of " + std::to_string(band_px) + " px does not fit the sprite");
  }
  auto in = [&](int c, int r) { return support.contains(c, r) && support.at(c, r) != 0; };
  // Within band_px steps of leaving the support in direction (dc, dr).
  auto near_edge = [&](int c, int r, int dc, int dr) {
    for (int k = 1; k <= band_px; ++k) {
      if (!in(c + k * dc, r + k * dr)) return true;
    }
    return false;
  };
  Mask out(support.width(), support.height(), 0);
  for (int r = 0; r < support.height(); ++r) {
    for (int c = 0; c < support.width(); ++c) {
      if (!in(c, r)) continue;
      const bool bottom = near_edge(c, r, 0, 1);
      const bool top = near_edge(c, r, 0, -1);
      const bool left = near_edge(c, r, -1, 0);
      const bool right = near_edge(c, r, 1, 0);
      bool hit = false;
      switch (part) {
        case SpritePart::Bottom: hit = bottom; break;
        case SpritePart::Top: hit = top; break;
        case SpritePart::Left: hit = left; break;
        case SpritePart::Right: hit = right; break;
        case SpritePart::Interior: hit = !(bottom || top || left || right); break;
      }
      out.at(c, r) = hit ? 1 : 0;
    }
  }
  return out;
}

PasteResult edge_ablation(const ImageBuffer& image, const ObjectCutout& cutout,
                          const std::set<SpritePart>& keep, int band_px) {
  if (keep.empty()) throw DomainError("edge ablation must keep at least one part");
  Mask kept(cutout.sprite.width(), cutout.sprite.height(), 0);
  for (SpritePart part : keep) {
    const Mask m = sprite_part_mask(cutout, part, band_px);
    for (std::size_t i = 0; i < m.size(); ++i) kept.pixels()[i] |= m.pixels()[i];
  }
  ObjectCutout partial = cutout;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (!kept.pixels()[i]) {
      partial.sprite.pixels()[i].a = 0;
      partial.measure_mask.pixels()[i] = 0;
    }
  }
  // At r = 1 the horizon only has to lie above the contact.
  return paste_object(image, partial, PlacementMode::PositionAndScale, 1.0,
                      cutout.ground_contact.y - 1.0);
}

PasteResult context_swap(const ObjectCutout& cutout, const ImageBuffer& new_background,
                         const std::string& slot) {
  if (std::find(cutout.placement_slots.begin(), cutout.placement_slots.end(), slot) ==
      cutout.placement_slots.end()) {
    throw PlacementError("cutout '" + cutout.source_id + "' is not plausible in slot '" + slot + "'");
  }
  return paste_object(new_background, cutout, PlacementMode::PositionAndScale, 1.0,
                      cutout.ground_contact.y - 1.0);
}

}  // namespace depthprobe
