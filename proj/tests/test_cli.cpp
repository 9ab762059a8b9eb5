#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

/// Runs the CLI with `args`, capturing stdout.
Run run_cli(const std::string& args, const fs::path& dir) {
  const auto capture = dir / "stdout.txt";
  const std::string cmd = std::string("\"") + MESGAME_CLI + "\" " + args + " > \"" +
                          capture.string() + "\" 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(capture);
  std::ostringstream text;
  text << in.rdbuf();
  r.out = text.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mesgame_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string table1() { return mesgame::testing::scenario_path("table1.scn"); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("solve: feasible seed exits 0 and writes the per-MES csv") {
  TempDir tmp;
  const auto out = tmp.path / "m.csv";
  const auto r = run_cli("solve --scenario " + table1() + " --seed 3 --out " +
                             out.string(),
                         tmp.path);
  CHECK(r.status == 0);
  CHECK(r.out.find("status: feasible") != std::string::npos);
  const auto csv = slurp(out);
  CHECK(csv.rfind("id,rcs,lcs,energy,utility,participates\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);
}

TEST_CASE("solve: infeasible seed exits 2 and names the constraint") {
  TempDir tmp;
  const auto r = run_cli("solve --scenario " + table1() + " --seed 1", tmp.path);
  CHECK(r.status == 2);
  CHECK(r.out.find("violated: lcs[L2].demand_min") != std::string::npos);
}

TEST_CASE("solve: input errors exit 3") {
  TempDir tmp;
  CHECK(run_cli("solve --scenario " + (tmp.path / "none.scn").string(), tmp.path)
            .status == 3);
  const auto bad = tmp.path / "bad.scn";
  std::ofstream(bad) << "[weights]\nloading_weight = 0.5\n[rcs]\nR1 ten 90\n";
  CHECK(run_cli("solve --scenario " + bad.string(), tmp.path).status == 3);
  CHECK(run_cli("solve", tmp.path).status != 0);
}

TEST_CASE("solve: --oracle writes the oracle report") {
  TempDir tmp;
  const auto out = tmp.path / "m.csv";
  const auto r = run_cli("solve --scenario " + table1() +
                             " --seed 3 --oracle --out " + out.string(),
                         tmp.path);
  CHECK(r.status == 0);
  const auto report = slurp(tmp.path / "m.oracle.csv");
  CHECK(report.find("grid_price:") != std::string::npos);
  CHECK(report.find("max_best_response_deviation_steps:") != std::string::npos);
}

TEST_CASE("solve: a directory is solved file by file") {
  TempDir tmp;
  fs::copy_file(table1(), tmp.path / "a.scn");
  fs::copy_file(mesgame::testing::scenario_path("fig4_base.scn"), tmp.path / "b.scn");
  const auto r = run_cli("solve --scenario " + tmp.path.string() + " --seed 3",
                         tmp.path);
  CHECK(r.status == 0);
  const auto a = r.out.find("slot: a.scn");
  const auto b = r.out.find("slot: b.scn");
  CHECK(a != std::string::npos);
  CHECK(b != std::string::npos);
  CHECK(a < b);
}

TEST_CASE("compare lists all three schemes") {
  TempDir tmp;
  const auto r = run_cli("compare --scenario " + table1() + " --seed 3", tmp.path);
  CHECK(r.status == 0);
  CHECK(r.out.find("\nproposed,1,") != std::string::npos);
  CHECK(r.out.find("\nprice_minimized,1,") != std::string::npos);
  CHECK(r.out.find("\nrandom,1,") != std::string::npos);
}

TEST_CASE("oracle-check agrees with the solver") {
  TempDir tmp;
  CHECK(run_cli("oracle-check --scenario " + table1() + " --seed 3", tmp.path)
            .status == 0);
  CHECK(run_cli("oracle-check --scenario " + table1() + " --seed 1", tmp.path)
            .status == 2);
}

TEST_CASE("sweep output is byte-identical across runs and thread counts") {
  TempDir tmp;
  const auto spec = tmp.path / "s.sweep";
  fs::copy_file(table1(), tmp.path / "table1.scn");
  std::ofstream(spec) << "[sweep]\nscenario = table1.scn\n"
                         "parameter = capacity_mean\nvalues = 14 20\n"
                         "seed_range = 1 6\n";
  const auto a = tmp.path / "a.csv";
  const auto b = tmp.path / "b.csv";
  CHECK(run_cli("sweep --spec " + spec.string() + " --out " + a.string(), tmp.path)
            .status == 0);
  CHECK(run_cli("sweep --spec " + spec.string() + " --out " + b.string() +
                    " --threads 3",
                tmp.path)
            .status == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(tmp.path / "a.mean.csv") == slurp(tmp.path / "b.mean.csv"));
  CHECK_FALSE(slurp(a).empty());
}

}  // TEST_SUITE
