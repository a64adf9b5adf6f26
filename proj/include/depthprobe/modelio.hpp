#pragma once

#include <sys/types.h>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depthprobe/disparity.hpp"
#include "depthprobe/oracle.hpp"
#include "depthprobe/raster.hpp"

namespace depthprobe {

enum class EndpointKind { Subprocess, Directory, BuiltinOracle };

std::string_view to_string(EndpointKind kind);

/// Where disparity maps come from.
struct ModelEndpoint {
  EndpointKind kind = EndpointKind::BuiltinOracle;
  /// Subprocess: argv. A "{exchange}" argument is replaced by the exchange
  /// directory; without one, "--exchange DIR" is appended.
  std::vector<std::string> command;
  /// Directory: exchange directory served by an adapter started elsewhere.
  std::filesystem::path exchange_dir;
  double timeout_s = 120.0;
  std::size_t max_batch = 64;
  /// BuiltinOracle: overrides the mode carried by each scene hint.
  OracleMode oracle_mode = OracleMode::GeometryAware;
  std::uint64_t oracle_seed = 0;

  /// Throws ConfigError.
  void validate() const;

  /// "oracle:geometry", "oracle:prior", "dir:PATH" or "cmd:PROGRAM ARGS...".
  /// Arguments of a command are split on whitespace.
  static ModelEndpoint parse(std::string_view text);
  std::string describe() const;
};

/// Root for temporary exchange directories: $DEPTHPROBE_EXCHANGE_ROOT if
/// set, the system temp directory otherwise.
std::filesystem::path exchange_root();

/// A live connection to an endpoint. For Subprocess endpoints the adapter is
/// started by the constructor and asked to shut down by the destructor. One
/// batch is in flight at a time; concurrent callers are serialized.
class ModelSession {
 public:
  explicit ModelSession(ModelEndpoint endpoint);
  ~ModelSession();
  ModelSession(const ModelSession&) = delete;
  ModelSession& operator=(const ModelSession&) = delete;

  const ModelEndpoint& endpoint() const noexcept { return endpoint_; }
  const std::filesystem::path& exchange_dir() const noexcept { return exchange_; }

  /// One map per image, same size, in input order. Scene hints are required
  /// for BuiltinOracle and ignored otherwise. Any failing item fails the
  /// whole batch.
  std::vector<DisparityMap> request(const std::vector<ImageBuffer>& images,
                                    const std::vector<std::optional<OracleSpec>>& hints = {});

 private:
  std::vector<DisparityMap> request_oracle(const std::vector<ImageBuffer>& images,
                                           const std::vector<std::optional<OracleSpec>>& hints) const;
  std::vector<DisparityMap> request_exchange(const std::vector<ImageBuffer>& images);
  void launch();
  void shutdown() noexcept;
  void clear_exchange() const;
  std::string log_tail() const;

  ModelEndpoint endpoint_;
  std::filesystem::path exchange_;
  bool owns_exchange_ = false;
  pid_t child_ = -1;
  std::uint64_t batch_counter_ = 0;
  std::mutex mutex_;
};

std::vector<DisparityMap> request_disparity(ModelSession& session, const std::vector<ImageBuffer>& images,
                                            const std::vector<std::optional<OracleSpec>>& hints = {});

/// One-shot convenience that opens and closes a session.
std::vector<DisparityMap> request_disparity(const ModelEndpoint& endpoint, const std::vector<ImageBuffer>& images,
                                            const std::vector<std::optional<OracleSpec>>& hints = {});

}  // namespace depthprobe
