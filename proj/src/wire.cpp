#include "depthprobe/wire.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <system_error>

#include "json.hpp"

namespace depthprobe::wire {

namespace fs = std::filesystem;
using nlohmann::json;

EncodedDisparity encode(const DisparityMap& map) {
  map.validate();
  EncodedDisparity out{Gray16Image(map.width(), map.height(), 0), 0.0};
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (map.is_valid(c, r)) out.d_max = std::max(out.d_max, map.at(c, r));
    }
  }
  if (out.d_max <= 0.0) return out;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (!map.is_valid(c, r)) continue;
      const double q = std::lround(map.at(c, r) / out.d_max * kQuantLevels);
      out.pixels.at(c, r) = static_cast<std::uint16_t>(std::clamp(q, 0.0, kQuantLevels));
    }
  }
  return out;
}

DisparityMap decode(const EncodedDisparity& encoded) {
  DisparityMap map(encoded.pixels.width(), encoded.pixels.height());
  const auto src = encoded.pixels.pixels();
  const auto dst = map.values.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] / kQuantLevels * encoded.d_max;
  return map;
}

fs::path image_path(const fs::path& dir, const std::string& name) { return dir / (name + ".png"); }
fs::path response_png(const fs::path& dir, const std::string& name) { return dir / (name + ".disp.png"); }
fs::path response_sidecar(const fs::path& dir, const std::string& name) { return dir / (name + ".disp.json"); }
fs::path item_done(const fs::path& dir, const std::string& name) { return dir / (name + ".done"); }
fs::path item_error(const fs::path& dir, const std::string& name) { return dir / (name + ".error"); }

void touch(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot create file");
}

namespace {

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError(tmp.string(), "cannot open for writing");
    out << text;
    if (!out) throw IoError(tmp.string(), "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError(path.string(), "rename failed: " + ec.message());
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ProtocolError(path.string(), "missing or unreadable");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ProtocolError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

void write_request(const fs::path& dir, const RequestManifest& manifest) {
  json images = json::array();
  for (const auto& n : manifest.names) images.push_back({{"image", n + ".png"}});
  write_text_atomic(dir / kRequestFile, json{{"batch_id", manifest.batch_id}, {"images", images}}.dump(2));
}

RequestManifest read_request(const fs::path& dir) {
  const fs::path path = dir / kRequestFile;
  const json j = read_json_file(path);
  RequestManifest m;
  try {
    m.batch_id = j.at("batch_id").get<std::string>();
    for (const auto& item : j.at("images")) {
      const auto file = item.at("image").get<std::string>();
      if (file.size() <= 4 || file.substr(file.size() - 4) != ".png") {
        throw ProtocolError(path.string(), "image entry '" + file + "' is not a .png");
      }
      m.names.push_back(file.substr(0, file.size() - 4));
    }
  } catch (const json::exception& e) {
    throw ProtocolError(path.string(), std::string("bad manifest: ") + e.what());
  }
  return m;
}

void write_response(const fs::path& dir, const std::string& name, const DisparityMap& map) {
  const EncodedDisparity enc = encode(map);
  write_png_gray16(response_png(dir, name), enc.pixels);
  write_text_atomic(response_sidecar(dir, name),
                    json{{"d_max", enc.d_max}, {"width", map.width()}, {"height", map.height()}}.dump());
  touch(item_done(dir, name));
}

DisparityMap read_response(const fs::path& dir, const std::string& name, int width, int height) {
  const fs::path side = response_sidecar(dir, name);
  const json j = read_json_file(side);
  double d_max = 0.0;
  int sw = 0, sh = 0;
  try {
    d_max = j.at("d_max").get<double>();
    sw = j.at("width").get<int>();
    sh = j.at("height").get<int>();
  } catch (const json::exception& e) {
    throw ProtocolError(side.string(), std::string("bad sidecar: ") + e.what());
  }
  if (!std::isfinite(d_max) || d_max < 0.0 || d_max >= 1.0) {
    throw ProtocolError(side.string(), "d_max must be finite and in [0, 1)");
  }
  if (sw != width || sh != height) {
    throw ProtocolError(side.string(), "declares " + std::to_string(sw) + "x" + std::to_string(sh) + ", expected " +
                                           std::to_string(width) + "x" + std::to_string(height));
  }

  const fs::path png = response_png(dir, name);
  EncodedDisparity enc;
  enc.d_max = d_max;
  try {
    enc.pixels = read_png_gray16(png);
  } catch (const IoError& e) {
    throw ProtocolError(png.string(), e.what());
  }
  if (enc.pixels.width() != width || enc.pixels.height() != height) {
    throw ProtocolError(png.string(), "image is " + std::to_string(enc.pixels.width()) + "x" +
                                          std::to_string(enc.pixels.height()) + ", expected " +
                                          std::to_string(width) + "x" + std::to_string(height));
  }
  return decode(enc);
}

void check_response(const fs::path& dir, const std::string& name, int width, int height) {
  (void)read_response(dir, name, width, height);
}

}  // namespace depthprobe::wire
