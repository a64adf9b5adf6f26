#include "depthprobe/modelio.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <stdlib.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "depthprobe/png_io.hpp"
#include "depthprobe/wire.hpp"

extern char** environ;

namespace depthprobe {

namespace fs = std::filesystem;

namespace {

constexpr auto kPollInterval = std::chrono::milliseconds(2);
constexpr auto kShutdownGrace = std::chrono::seconds(2);
constexpr const char* kLogFile = "adapter.log";

std::string item_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img_%05zu", i);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string describe_status(int status) {
  if (WIFEXITED(status)) return "exit code " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "signal " + std::to_string(WTERMSIG(status));
  return "status " + std::to_string(status);
}

}  // namespace

std::string_view to_string(EndpointKind kind) {
  switch (kind) {
    case EndpointKind::Subprocess:
      return "Subprocess";
    case EndpointKind::Directory:
      return "Directory";
    case EndpointKind::BuiltinOracle:
      return "BuiltinOracle";
  }
  return "?";
}

void ModelEndpoint::validate() const {
  if (!(timeout_s > 0.0)) throw ConfigError("endpoint timeout_s must be positive");
  if (max_batch == 0) throw ConfigError("endpoint max_batch must be positive");
  if (kind == EndpointKind::Subprocess && (command.empty() || command.front().empty())) {
    throw ConfigError("subprocess endpoint needs a command");
  }
  if (kind == EndpointKind::Directory && exchange_dir.empty()) {
    throw ConfigError("directory endpoint needs an exchange directory");
  }
}

ModelEndpoint ModelEndpoint::parse(std::string_view text) {
  ModelEndpoint ep;
  const auto colon = text.find(':');
  const std::string_view scheme = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (scheme == "oracle") {
    ep.kind = EndpointKind::BuiltinOracle;
    ep.oracle_mode = rest.empty() ? OracleMode::GeometryAware : parse_oracle_mode(rest);
  } else if (scheme == "dir") {
    ep.kind = EndpointKind::Directory;
    ep.exchange_dir = std::string(rest);
  } else if (scheme == "cmd") {
    ep.kind = EndpointKind::Subprocess;
    std::istringstream ss{std::string(rest)};
    for (std::string arg; ss >> arg;) ep.command.push_back(arg);
  } else {
    throw ConfigError("unknown endpoint '" + std::string(text) + "' (expected oracle:, dir: or cmd:)");
  }
  ep.validate();
  return ep;
}

std::string ModelEndpoint::describe() const {
  switch (kind) {
    case EndpointKind::BuiltinOracle:
      return "oracle:" + std::string(to_string(oracle_mode));
    case EndpointKind::Directory:
      return "dir:" + exchange_dir.string();
    case EndpointKind::Subprocess: {
      std::string s = "cmd:";
      for (std::size_t i = 0; i < command.size(); ++i) s += (i ? " " : "") + command[i];
      return s;
    }
  }
  return "?";
}

fs::path exchange_root() {
  if (const char* env = std::getenv("DEPTHPROBE_EXCHANGE_ROOT"); env != nullptr && *env != '\0') return env;
  return fs::temp_directory_path();
}

ModelSession::ModelSession(ModelEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  endpoint_.validate();
  if (endpoint_.kind == EndpointKind::BuiltinOracle) return;
  if (endpoint_.kind == EndpointKind::Directory) {
    exchange_ = endpoint_.exchange_dir;
    std::error_code ec;
    fs::create_directories(exchange_, ec);
    if (!fs::is_directory(exchange_)) throw IoError(exchange_.string(), "exchange directory unavailable");
    return;
  }
  const fs::path root = exchange_root();
  std::error_code ec;
  fs::create_directories(root, ec);
  std::string tmpl = (root / "depthprobe-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) throw IoError(root.string(), "cannot create exchange directory");
  exchange_ = tmpl;
  owns_exchange_ = true;
  try {
    launch();
  } catch (...) {
    fs::remove_all(exchange_, ec);
    throw;
  }
}

ModelSession::~ModelSession() { shutdown(); }

void ModelSession::launch() {
  std::vector<std::string> args = endpoint_.command;
  bool substituted = false;
  for (auto& a : args) {
    if (const auto pos = a.find("{exchange}"); pos != std::string::npos) {
      a.replace(pos, 10, exchange_.string());
      substituted = true;
    }
  }
  if (!substituted) {
    args.push_back("--exchange");
    args.push_back(exchange_.string());
  }
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  const std::string log = (exchange_ / kLogFile).string();
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw ModelError("cannot launch adapter '" + args[0] + "': " + std::strerror(rc));
  child_ = pid;
}

void ModelSession::shutdown() noexcept {
  try {
    if (child_ > 0) {
      wire::touch(exchange_ / wire::kShutdown);
      const auto deadline = std::chrono::steady_clock::now() + kShutdownGrace;
      int status = 0;
      while (::waitpid(child_, &status, WNOHANG) == 0) {
        if (std::chrono::steady_clock::now() > deadline) {
          ::kill(child_, SIGKILL);
          ::waitpid(child_, &status, 0);
          break;
        }
        std::this_thread::sleep_for(kPollInterval);
      }
      child_ = -1;
    }
  } catch (...) {
  }
  if (owns_exchange_) {
    std::error_code ec;
    fs::remove_all(exchange_, ec);
  }
}

void ModelSession::clear_exchange() const {
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(exchange_, ec)) {
    if (entry.is_regular_file() && entry.path().filename() != kLogFile) fs::remove(entry.path(), ec);
  }
}

std::string ModelSession::log_tail() const {
  if (exchange_.empty()) return {};
  std::string text = read_text(exchange_ / kLogFile);
  constexpr std::size_t kMax = 2000;
  if (text.size() > kMax) text = "..." + text.substr(text.size() - kMax);
  return text;
}

std::vector<DisparityMap> ModelSession::request(const std::vector<ImageBuffer>& images,
                                                const std::vector<std::optional<OracleSpec>>& hints) {
  if (images.size() > endpoint_.max_batch) {
    throw ConfigError("batch of " + std::to_string(images.size()) + " exceeds max_batch " +
                      std::to_string(endpoint_.max_batch));
  }
  if (images.empty()) return {};
  if (endpoint_.kind == EndpointKind::BuiltinOracle) return request_oracle(images, hints);
  std::lock_guard lock(mutex_);
  return request_exchange(images);
}

std::vector<DisparityMap> ModelSession::request_oracle(const std::vector<ImageBuffer>& images,
                                                       const std::vector<std::optional<OracleSpec>>& hints) const {
  if (hints.size() != images.size()) throw ConfigError("oracle endpoint needs one scene hint per image");
  std::vector<DisparityMap> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!hints[i]) throw ConfigError("oracle endpoint needs a scene hint for image " + std::to_string(i));
    OracleSpec spec = *hints[i];
    spec.mode = endpoint_.oracle_mode;
    out.push_back(render_oracle(spec, images[i].width(), images[i].height(), endpoint_.oracle_seed));
  }
  return out;
}

std::vector<DisparityMap> ModelSession::request_exchange(const std::vector<ImageBuffer>& images) {
  if (endpoint_.kind == EndpointKind::Subprocess && child_ <= 0) throw ModelError("adapter is not running");
  clear_exchange();
  wire::RequestManifest manifest;
  manifest.batch_id = std::to_string(::getpid()) + "-" + std::to_string(++batch_counter_);
  for (std::size_t i = 0; i < images.size(); ++i) {
    manifest.names.push_back(item_name(i));
    write_png_rgb(wire::image_path(exchange_, manifest.names.back()), images[i]);
  }
  wire::write_request(exchange_, manifest);

  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(endpoint_.timeout_s);
  const fs::path done = exchange_ / wire::kBatchDone;
  while (!fs::exists(done)) {
    if (child_ > 0) {
      int status = 0;
      if (::waitpid(child_, &status, WNOHANG) == child_) {
        child_ = -1;
        throw ModelError("adapter terminated (" + describe_status(status) + ") during batch " +
                         manifest.batch_id + "\n" + log_tail());
      }
    }
    if (std::chrono::steady_clock::now() > deadline) {
      if (child_ > 0) {
        ::kill(child_, SIGKILL);
        ::waitpid(child_, nullptr, 0);
        child_ = -1;
      }
      throw EndpointTimeoutError("no response for batch " + manifest.batch_id + " within " +
                                 std::to_string(endpoint_.timeout_s) + " s");
    }
    std::this_thread::sleep_for(kPollInterval);
  }

  for (const auto& name : manifest.names) {
    const fs::path err = wire::item_error(exchange_, name);
    if (fs::exists(err)) throw ModelError("adapter reported an error for " + err.string() + ":\n" + read_text(err));
  }
  std::vector<DisparityMap> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.push_back(wire::read_response(exchange_, manifest.names[i], images[i].width(), images[i].height()));
  }
  return out;
}

std::vector<DisparityMap> request_disparity(ModelSession& session, const std::vector<ImageBuffer>& images,
                                            const std::vector<std::optional<OracleSpec>>& hints) {
  return session.request(images, hints);
}

std::vector<DisparityMap> request_disparity(const ModelEndpoint& endpoint, const std::vector<ImageBuffer>& images,
                                            const std::vector<std::optional<OracleSpec>>& hints) {
  ModelSession session(endpoint);
  return session.request(images, hints);
}

}  // namespace depthprobe
