#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "lll/instance.hpp"

// Drives the built binary over its public surface: subcommands, file
// formats, exit codes, determinism.

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lll_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(LLL_CLI_PATH) + " " + args +
                          " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("gen is deterministic and loadable") {
  TempDir tmp;
  const std::string a = tmp.file("a.json");
  const std::string b = tmp.file("b.json");
  REQUIRE(run("gen --family shared-variable-random --n-events 15 --seed 11 --out " + a) == 0);
  REQUIRE(run("gen --family shared-variable-random --n-events 15 --seed 11 --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  REQUIRE(run("gen --family shared-variable-random --n-events 15 --seed 12 --out " + b) == 0);
  CHECK(slurp(a) != slurp(b));
}

TEST_CASE("run verifies in both modes and verify accepts the report") {
  TempDir tmp;
  const std::string inst = tmp.file("inst.json");
  const std::string rep = tmp.file("rep.json");
  REQUIRE(run("gen --family star-hyperedge --n-events 14 --max-rank 4 --max-domain 4 --seed 3 --out " + inst) == 0);
  CHECK(run("run " + inst + " --mode sequential --order reversed --out " + rep) == 0);
  CHECK(run("verify " + inst + " " + rep) == 0);
  CHECK(run("run " + inst + " --mode local --out " + rep) == 0);
  CHECK(slurp(rep).find("round_log") != std::string::npos);
  CHECK(run("verify " + inst + " " + rep) == 0);
}

TEST_CASE("verify rejects a hitting assignment with exit 1") {
  TempDir tmp;
  const std::string inst_path = tmp.file("inst.json");
  const std::string bad = tmp.file("bad.json");
  REQUIRE(run("gen --family k-sat-like --n-events 6 --seed 4 --out " +
              inst_path) == 0);
  // Force event 0 to occur: its single violating row, zeros elsewhere.
  const lll::LLLInstance inst =
      lll::instance_from_json(lll::json::parse(slurp(inst_path)));
  lll::Assignment fixed(inst.num_variables(), 0);
  const lll::Event& e0 = inst.events[0];
  for (std::size_t i = 0; i < e0.vbl.size(); ++i) {
    fixed[inst.variable_index(e0.vbl[i])] = e0.occurring[0][i];
  }
  std::ofstream(bad) << lll::assignment_to_json(inst, fixed).dump(2) << "\n";
  CHECK(run("verify " + inst_path + " " + bad) == 1);
}

TEST_CASE("corrupted or criterion-failing files exit 3") {
  TempDir tmp;
  const std::string bad = tmp.file("bad.json");
  std::ofstream(bad) << "{ not json";
  CHECK(run("run " + bad) == 3);
  CHECK(run("run " + tmp.file("missing.json")) == 3);
}

TEST_CASE("probe and boundary-table emit deterministic CSV") {
  TempDir tmp;
  const std::string a = tmp.file("a.csv");
  const std::string b = tmp.file("b.csv");
  REQUIRE(run("probe --r 2 --samples 100 --seed 9 --out " + a) == 0);
  REQUIRE(run("probe --r 2 --samples 100 --seed 9 --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("sample,lambda,margin,violation", 0) == 0);

  REQUIRE(run("boundary-table --grid 6 --max 0.5 --out " + a) == 0);
  const std::string table = slurp(a);
  CHECK(table.rfind("a,b,oracle_height,f3_height,abs_error", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 37);  // header + 36
}
