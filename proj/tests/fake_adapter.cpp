// Scriptable stand-in for a model adapter, used by the subprocess tests.
//
//   fake_adapter --exchange DIR [--mode MODE]
//
// Modes: echo (disparity from the red channel), constant:V, bad-size,
// bad-sidecar, exit, hang, error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "depthprobe/png_io.hpp"
#include "depthprobe/wire.hpp"

namespace fs = std::filesystem;
using namespace depthprobe;

namespace {

DisparityMap respond(const ImageBuffer& img, const std::string& mode) {
  DisparityMap map(img.width(), img.height());
  double constant = 0.0;
  if (mode.rfind("constant:", 0) == 0) constant = std::stod(mode.substr(9));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      map.at(x, y) = mode.rfind("constant:", 0) == 0 ? constant : 0.001 + 0.1 * img.at(x, y).r / 255.0;
    }
  }
  return map;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path dir;
  std::string mode = "echo";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--exchange") dir = argv[i + 1];
    if (flag == "--mode") mode = argv[i + 1];
  }
  if (dir.empty()) {
    std::cerr << "usage: fake_adapter --exchange DIR [--mode MODE]\n";
    return 2;
  }
  std::cerr << "fake adapter ready in mode " << mode << "\n";
  std::string last_batch;
  while (!fs::exists(dir / wire::kShutdown)) {
    if (!fs::exists(dir / wire::kRequestFile)) {
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
      continue;
    }
    wire::RequestManifest req;
    try {
      req = wire::read_request(dir);
    } catch (const std::exception&) {
      continue;
    }
    if (req.batch_id == last_batch) {
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
      continue;
    }
    last_batch = req.batch_id;
    if (mode == "exit") {
      std::cerr << "simulated crash on batch " << req.batch_id << "\n";
      return 3;
    }
    if (mode == "hang") continue;
    for (std::size_t k = 0; k < req.names.size(); ++k) {
      const std::string& name = req.names[k];
      if (mode == "error" && k == 0) {
        std::ofstream(wire::item_error(dir, name)) << "simulated inference failure\n";
        continue;
      }
      const ImageBuffer img = read_png_rgb(wire::image_path(dir, name));
      if (mode == "bad-size") {
        wire::write_response(dir, name, DisparityMap(img.width() - 1, img.height()));
        continue;
      }
      wire::write_response(dir, name, respond(img, mode));
      if (mode == "bad-sidecar") std::ofstream(wire::response_sidecar(dir, name)) << "{\"d_max\": ";
    }
    wire::touch(dir / wire::kBatchDone);
  }
  return 0;
}
