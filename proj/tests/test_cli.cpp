#include "prefetch/bench.hpp"

#include "doctest.h"
#include "json.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace prefetch;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fetchsim_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args, const fs::path& capture) {
  const char* bin = std::getenv("FETCHSIM_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "FETCHSIM_BIN must point at the binary");
  const std::string cmd =
      std::string(bin) + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("help exits cleanly and names the subcommands") {
  const fs::path dir = fresh_dir("help");
  CHECK(run_cli("--help", dir / "help.txt") == 0);
  const std::string text = read_file(dir / "help.txt");
  CHECK(text.find("solve") != std::string::npos);
  CHECK(text.find("sweep") != std::string::npos);
  CHECK(text.find("compare") != std::string::npos);
  CHECK(run_cli("solve --help", dir / "solve_help.txt") == 0);
}

TEST_CASE("solve dumps deterministic values") {
  const fs::path dir = fresh_dir("solve");
  write_file(dir / "config.json",
             R"({"s": 1.0, "mu": 1.0, "c": 2.0, "B1max": 1, "B2max": 1})");
  const int code = run_cli("solve --config " + (dir / "config.json").string() +
                               " --out " + (dir / "out").string(),
                           dir / "log.txt");
  REQUIRE(code == 0);
  const std::string values = read_file(dir / "out" / "values.csv");
  CHECK(values.find("0,1,0,0,2,FEbar\n") != std::string::npos);
  CHECK(values.find("1,0,0,0,1,FE\n") != std::string::npos);
}

TEST_CASE("solve reports the switchover structure") {
  const fs::path dir = fresh_dir("solve_sw");
  write_file(dir / "config.json",
             R"({"s": 0.6, "mu": 0.8, "c": 1.2, "B1max": 6, "B2max": 12})");
  const int code = run_cli("solve --config " + (dir / "config.json").string() +
                               " --out " + (dir / "out").string(),
                           dir / "log.txt");
  REQUIRE(code == 0);
  const nlohmann::json report =
      nlohmann::json::parse(read_file(dir / "out" / "report.json"));
  CHECK(report.at("mode") == "reduced");
  CHECK(report.at("is_switchover") == true);
  CHECK(report.at("psi") == nlohmann::json({-1, 1, 2, 2, 3, 3, 4}));
}

TEST_CASE("bad invocations exit with the config code") {
  const fs::path dir = fresh_dir("bad");
  CHECK(run_cli("fetch", dir / "a.txt") == 2);
  CHECK(run_cli("solve", dir / "b.txt") == 2);
  CHECK(run_cli("solve --bogus", dir / "c.txt") == 2);
  CHECK(run_cli("solve --config " + (dir / "nope.json").string(),
                dir / "d.txt") == 2);
  CHECK(run_cli("compare onlyone.csv", dir / "e.txt") == 2);

  write_file(dir / "bad_model.json", R"({
    "channel":   {"transition": [[0.5, 0.4], [0.7, 0.3]], "attribute": [0.5, 0.5]},
    "processor": {"transition": [[1.0]], "attribute": [0.5]}
  })");
  CHECK(run_cli("solve --config " + (dir / "bad_model.json").string() +
                    " --out " + (dir / "out").string(),
                dir / "f.txt") == 2);
  CHECK(read_file(dir / "f.txt").find("config:") != std::string::npos);
}

TEST_CASE("sweep reruns are byte-identical") {
  const fs::path dir = fresh_dir("rerun");
  write_file(dir / "scenario.json", R"({
    "name": "tiny",
    "channel":   {"transition": [[1.0]], "attribute": [0.5]},
    "processor": {"transition": [[1.0]], "attribute": [0.5]},
    "initial_b1": 2, "initial_b2": 1,
    "c_values": [1.0, 2.0], "episodes": 40, "base_seed": 7
  })");
  const std::string cmd = "sweep --config " + (dir / "scenario.json").string() +
                          " --policies never,always --out " +
                          (dir / "out").string();
  REQUIRE(run_cli(cmd, dir / "log1.txt") == 0);
  const std::string never1 = read_file(dir / "out" / "never.csv");
  const std::string always1 = read_file(dir / "out" / "always.csv");
  const std::string svg1 = read_file(dir / "out" / "tradeoff.svg");
  const std::string manifest1 = read_file(dir / "out" / "manifest.json");
  REQUIRE(run_cli(cmd, dir / "log2.txt") == 0);
  CHECK(read_file(dir / "out" / "never.csv") == never1);
  CHECK(read_file(dir / "out" / "always.csv") == always1);
  CHECK(read_file(dir / "out" / "tradeoff.svg") == svg1);
  CHECK(read_file(dir / "out" / "manifest.json") == manifest1);
}

TEST_CASE("compare maps outcomes to exit codes") {
  const fs::path dir = fresh_dir("compare");
  write_file(dir / "scenario.json", R"({
    "channel":   {"transition": [[1.0]], "attribute": [0.5]},
    "processor": {"transition": [[1.0]], "attribute": [0.5]},
    "initial_b1": 2, "initial_b2": 1,
    "c_values": [1.0, 2.0], "episodes": 40, "base_seed": 7
  })");
  REQUIRE(run_cli("sweep --config " + (dir / "scenario.json").string() +
                      " --policies never --out " + (dir / "out").string(),
                  dir / "log.txt") == 0);
  const std::string base = (dir / "out" / "never.csv").string();

  CHECK(run_cli("compare " + base + " " + base + " --tol 0", dir / "same.txt") ==
        0);
  CHECK(read_file(dir / "same.txt").find("compare: PASS") != std::string::npos);

  auto perturbed = read_tradeoff_csv(base);
  perturbed[0].d_ave *= 2.0;
  write_tradeoff_csv(dir / "perturbed.csv", perturbed);
  CHECK(run_cli("compare " + base + " " + (dir / "perturbed.csv").string() +
                    " --tol 0.2",
                dir / "diff.txt") == 4);
  CHECK(read_file(dir / "diff.txt").find("compare: FAIL") != std::string::npos);

  CHECK(run_cli("compare " + base + " " + (dir / "nope.csv").string(),
                dir / "missing.txt") == 2);
}

TEST_CASE("fon tracks opt within tolerance on a slow preset") {
  const fs::path dir = fresh_dir("fon_opt");
  REQUIRE(run_cli("sweep --preset slow_ds01_dmu167 --policies opt,fon "
                  "--episodes 400 --seed 12345 --c-grid 2:2:lin:1 --out " +
                      (dir / "out").string(),
                  dir / "log.txt") == 0);
  CHECK(run_cli("compare " + (dir / "out" / "opt.csv").string() + " " +
                    (dir / "out" / "fon.csv").string() + " --tol 0.2",
                dir / "cmp.txt") == 0);
  CHECK(read_file(dir / "cmp.txt").find("compare: PASS") != std::string::npos);
}
