// SPDX-License-Identifier: Apache-2.0
//
// Drives the parpinc executable end to end.

#include "parpinc/harness.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace parpinc;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(PARPINC_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("parpinc_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string manifest_value(const fs::path& p, const std::string& key) {
  for (const auto& [k, v] : read_key_values(p)) {
    if (k == key) return v;
  }
  return {};
}

}  // namespace

TEST_CASE("gaussian-demo writes trajectory, summary and manifest") {
  const auto dir = scratch("gauss");
  REQUIRE(run("gaussian-demo --rows 8 --cols 20 --iters 12 --seed 5 --out " +
                  (dir / "a").string(),
              dir / "log") == 0);
  const auto rows = read_csv(dir / "a" / "trajectory.csv");
  CHECK(rows.size() == 12);
  CHECK(rows.front().pinc_db == 0.0);
  CHECK(fs::exists(dir / "a" / "summary.csv"));
  CHECK(manifest_value(dir / "a" / "manifest.txt", "seed") == "5");
  CHECK(manifest_value(dir / "a" / "manifest.txt", "cols") == "20");

  REQUIRE(run("gaussian-demo --rows 8 --cols 20 --iters 12 --seed 5 --out " +
                  (dir / "b").string(),
              dir / "log") == 0);
  CHECK(slurp(dir / "a" / "trajectory.csv") == slurp(dir / "b" / "trajectory.csv"));
}

TEST_CASE("config file values apply and flags override them") {
  const auto dir = scratch("config");
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "# demo settings\nrows = 6\ncols = 15\niters = 4\nseed = 11\nrho-db = 1.0\n";
  }
  REQUIRE(run("gaussian-demo --config " + (dir / "run.ini").string() + " --seed 12 --out " +
                  (dir / "o").string(),
              dir / "log") == 0);
  const auto m = dir / "o" / "manifest.txt";
  CHECK(manifest_value(m, "rows") == "6");
  CHECK(manifest_value(m, "cols") == "15");
  CHECK(manifest_value(m, "iters") == "4");
  CHECK(manifest_value(m, "rho_db") == "1");
  CHECK(manifest_value(m, "seed") == "12");
}

TEST_CASE("ofdm-sim output is independent of the worker count") {
  const auto dir = scratch("ofdm");
  const std::string common =
      "ofdm-sim --bs-antennas 8 --users 2 --subcarriers 64 --taps 3 --iters 3 --trials 4 "
      "--ccdf-iter 2 --seed 3 ";
  REQUIRE(run(common + "--threads 1 --out " + (dir / "t1").string(), dir / "log1") == 0);
  REQUIRE(run(common + "--threads 4 --out " + (dir / "t4").string(), dir / "log4") == 0);
  for (const char* f : {"trajectory.csv", "summary.csv", "ccdf.csv"}) {
    CHECK(slurp(dir / "t1" / f) == slurp(dir / "t4" / f));
  }
  const auto rows = read_csv(dir / "t1" / "trajectory.csv");
  CHECK(rows.size() == static_cast<std::size_t>(4 * 3 * (1 + 8)));
  const auto mask = manifest_value(dir / "t1" / "manifest.txt", "mask");
  CHECK(mask.find("default") != std::string::npos);
  // Too few trials for a 99th percentile: a warning, not an error.
  CHECK(slurp(dir / "log1").find("too few") != std::string::npos);
}

TEST_CASE("ofdm-sim accepts a mask file") {
  const auto dir = scratch("mask");
  {
    std::ofstream m(dir / "mask.txt");
    m << "0 1 1 1 1 1 0 0 0 0 0 0 0 1 1 1\n";
  }
  REQUIRE(run("ofdm-sim --bs-antennas 6 --users 2 --subcarriers 16 --iters 2 --trials 1 "
              "--ccdf-iter 2 --mask-file " +
                  (dir / "mask.txt").string() + " --out " + (dir / "o").string(),
              dir / "log") == 0);
  CHECK(manifest_value(dir / "o" / "manifest.txt", "used_subcarriers") == "8");
  for (const auto& r : read_csv(dir / "o" / "trajectory.csv")) {
    if (r.antenna < 0) CHECK(*r.oob_resid == 0.0);
  }
  CHECK(run("ofdm-sim --subcarriers 32 --trials 1 --mask-file " + (dir / "mask.txt").string() +
                " --out " + (dir / "bad").string(),
            dir / "log") == 1);
}

TEST_CASE("project prints the projection and a passing certificate") {
  const auto dir = scratch("project");
  {
    std::ofstream v(dir / "z.txt");
    v << "# re im\n3 0\n1\n1, 0\n1 0\n";
  }
  REQUIRE(run("project --rho-db 3.010299956639812 --input " + (dir / "z.txt").string(),
              dir / "log") == 0);
  const auto out = slurp(dir / "log");
  CHECK(out.find("case = scaled-tail") != std::string::npos);
  CHECK(out.find("L = 1") != std::string::npos);
  CHECK(out.find("support ok") != std::string::npos);
  CHECK(out.find("2.3660") != std::string::npos);

  REQUIRE(run("project --rho-db 3.010299956639812 --power-cap 2 --input " +
                  (dir / "z.txt").string(),
              dir / "log") == 0);
  CHECK(slurp(dir / "log").find("|x|^2 = 2") != std::string::npos);
}

TEST_CASE("bad arguments fail cleanly") {
  const auto dir = scratch("bad");
  CHECK(run("", dir / "log") != 0);
  CHECK(run("gaussian-demo --rows 30 --cols 20 --out " + (dir / "o").string(), dir / "log") == 1);
  CHECK(slurp(dir / "log").find("error:") != std::string::npos);
  CHECK(run("project --rho-db 1 --input " + (dir / "missing.txt").string(), dir / "log") == 1);
}
