#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "depthprobe/disparity.hpp"
#include "depthprobe/png_io.hpp"

namespace depthprobe::wire {

inline constexpr const char* kRequestFile = "request.json";
inline constexpr const char* kBatchDone = "done";
inline constexpr const char* kShutdown = "shutdown";
inline constexpr double kQuantLevels = 65535.0;

struct EncodedDisparity {
  Gray16Image pixels;
  double d_max = 0.0;
};

/// d_max is the largest valid value; invalid pixels encode as 0.
EncodedDisparity encode(const DisparityMap& map);
DisparityMap decode(const EncodedDisparity& encoded);

struct RequestManifest {
  std::string batch_id;
  /// Image stems; each is sent as `<stem>.png`.
  std::vector<std::string> names;
};

/// Writes request.json through a temporary file and a rename.
void write_request(const std::filesystem::path& dir, const RequestManifest& manifest);
/// Throws ProtocolError naming request.json when it is malformed.
RequestManifest read_request(const std::filesystem::path& dir);

std::filesystem::path image_path(const std::filesystem::path& dir, const std::string& name);
std::filesystem::path response_png(const std::filesystem::path& dir, const std::string& name);
std::filesystem::path response_sidecar(const std::filesystem::path& dir, const std::string& name);
std::filesystem::path item_done(const std::filesystem::path& dir, const std::string& name);
std::filesystem::path item_error(const std::filesystem::path& dir, const std::string& name);

/// Writes `<name>.disp.png`, `<name>.disp.json` and the `<name>.done` sentinel.
void write_response(const std::filesystem::path& dir, const std::string& name, const DisparityMap& map);

/// Validates one response against the expected frame size and decodes it.
/// Every violation throws ProtocolError naming the offending file.
DisparityMap read_response(const std::filesystem::path& dir, const std::string& name, int width, int height);

/// Protocol checker: read_response without keeping the result.
void check_response(const std::filesystem::path& dir, const std::string& name, int width, int height);

/// Creates an empty sentinel file.
void touch(const std::filesystem::path& path);

}  // namespace depthprobe::wire
