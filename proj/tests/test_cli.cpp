#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
};

CliResult cli(const std::string& args) {
  const std::string cmd = std::string(DEPTHPROBE_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = ::popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int status = ::pclose(p);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST(Cli, VersionAndHelp) {
  EXPECT_EQ(cli("--version").code, 0);
  const CliResult r = cli("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("probe"), std::string::npos);
}

TEST(Cli, SynthThenProbeThenReport) {
  oracle::TempDir tmp;
  const fs::path data = tmp.path() / "data", out = tmp.path() / "out";
  ASSERT_EQ(cli("synth --out " + data.string() + " --scenes 3 --seed 2").code, 0);
  ASSERT_TRUE(fs::exists(data / "images"));

  const fs::path cfg = tmp.path() / "cfg.json";
  std::ofstream(cfg) << R"({"crop_offsets": [-20, 0, 20], "bracket": false})";
  const CliResult r = cli("probe pitch-crop --config " + cfg.string() + " --dataset " + data.string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("slope"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "trials.csv"));

  const fs::path again = tmp.path() / "again";
  ASSERT_EQ(cli("report " + out.string() + " --out " + again.string()).code, 0);
  std::ifstream a(out / "trials.csv"), b(again / "trials.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Cli, OracleThenFitHorizon) {
  oracle::TempDir tmp;
  const fs::path scene = tmp.path() / "scene.json";
  std::ofstream(scene) << R"({"plane": {"horizon_y": -9.0}})";
  ASSERT_EQ(cli("oracle --scene " + scene.string() + " --out " + (tmp.path() / "m").string()).code, 0);
  const CliResult r = cli("fit horizon --map " + (tmp.path() / "m.disp.png").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto at = r.out.find("horizon_y");
  ASSERT_NE(at, std::string::npos) << r.out;
  EXPECT_NEAR(std::stod(r.out.substr(at + 9)), -9.0, 0.5) << r.out;
}

TEST(Cli, ErrorsExitNonZero) {
  EXPECT_NE(cli("probe pitch-crop --out /tmp/x --endpoint bogus:thing --synthetic 2").code, 0);
  EXPECT_NE(cli("fit horizon --map /nonexistent.png").code, 0);
  EXPECT_NE(cli("no-such-command").code, 0);
}
