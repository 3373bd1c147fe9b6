#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "scenario.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_binary() {
  const char* env = std::getenv("COSTCOMM_CLI");
  REQUIRE(env != nullptr);
  return env;
}

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("costcomm_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& name) const {
    return (dir / name).string();
  }
};

int run(const std::string& args) {
  const std::string cmd =
      "\"" + cli_binary() + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

bool has_line_starting(const std::string& text, const std::string& prefix) {
  for (const std::string& line : lines_of(text))
    if (line.rfind(prefix, 0) == 0) return true;
  return false;
}

std::string write_defense(const Scratch& scratch) {
  const std::string path = scratch.file("defense.json");
  std::ofstream out(path);
  out << costcomm::serialize_scenario(
      costcomm::defense_scenario(0.3, 0.6, 0.3, 0.6, 0.95, 1.0));
  return path;
}

}  // namespace

TEST_CASE("solve reports carry the provenance stanza") {
  Scratch scratch;
  const std::string sc = write_defense(scratch);
  const std::string out = scratch.file("solve.txt");
  REQUIRE(run("solve --scenario " + sc + " --grid 21 --out " + out) == 0);

  const std::string text = slurp(out);
  CHECK(has_line_starting(text, "# command: solve"));
  CHECK(has_line_starting(text, "# version: costcomm 1.0.0"));
  CHECK(has_line_starting(text, "# scenario_hash: "));
  CHECK(has_line_starting(text, "# flags: grid=21 "));
  CHECK(has_line_starting(text, "# seed: 1"));
  CHECK(has_line_starting(text, "value: "));
  CHECK(has_line_starting(text, "mode: grid"));
  CHECK(has_line_starting(text, "iterations: "));
  CHECK(has_line_starting(text, "residual: "));
  CHECK(has_line_starting(text, "grid_nodes: 21"));
  CHECK(has_line_starting(text, "memo_entries: "));
}

TEST_CASE("price sweeps are byte-identical across runs") {
  Scratch scratch;
  const std::string sc = write_defense(scratch);
  const std::string out1 = scratch.file("sweep1.txt");
  const std::string out2 = scratch.file("sweep2.txt");
  const std::string args = " --grid 21 --rho 0,1 ";
  REQUIRE(run("sweep --scenario " + sc + args + "--out " + out1) == 0);
  REQUIRE(run("sweep --scenario " + sc + args + "--out " + out2) == 0);

  const std::string a = slurp(out1);
  CHECK(!a.empty());
  CHECK(a == slurp(out2));
}

TEST_CASE("sweep tables list one row per price") {
  Scratch scratch;
  const std::string sc = write_defense(scratch);
  const std::string out = scratch.file("sweep.txt");
  REQUIRE(run("sweep --scenario " + sc + " --grid 21 --rho 0,1 --out " + out) ==
          0);
  const std::string text = slurp(out);
  CHECK(has_line_starting(text, "# command: sweep"));
  CHECK(has_line_starting(
      text, "rho\toptimal\tnever\talways\titerations\tresidual\tmode"));
  CHECK(has_line_starting(text, "0\t"));
  CHECK(has_line_starting(text, "1\t"));

  const std::string empty_out = scratch.file("sweep_empty.txt");
  REQUIRE(run("sweep --scenario " + sc + " --grid 21 --rho \"\" --out " +
              empty_out) == 0);
  const auto lines = lines_of(slurp(empty_out));
  REQUIRE(lines.size() == 6);
  CHECK(lines.back() ==
        "rho\toptimal\tnever\talways\titerations\tresidual\tmode");
}

TEST_CASE("baseline comparisons tabulate all three policies") {
  Scratch scratch;
  const std::string sc = write_defense(scratch);
  const std::string out = scratch.file("baselines.txt");
  REQUIRE(run("baselines --scenario " + sc + " --grid 11 --out " + out) == 0);
  const std::string text = slurp(out);
  CHECK(has_line_starting(text, "policy\tvalue\tmode\titerations\tresidual"));
  CHECK(has_line_starting(text, "optimal\t"));
  CHECK(has_line_starting(text, "never\t"));
  CHECK(has_line_starting(text, "always\t"));
}

TEST_CASE("simulation reports include the rollout statistics") {
  Scratch scratch;
  const std::string sc = write_defense(scratch);
  const std::string out = scratch.file("sim.txt");
  REQUIRE(run("simulate --scenario " + sc +
              " --grid 11 --episodes 20 --baseline always --seed 5 --out " +
              out) == 0);
  const std::string text = slurp(out);
  CHECK(has_line_starting(text, "# command: simulate"));
  CHECK(has_line_starting(text, "# seed: 5"));
  CHECK(has_line_starting(text, "mean: "));
  CHECK(has_line_starting(text, "std_error: "));
  CHECK(has_line_starting(text, "comm_frequency: 1"));
  CHECK(has_line_starting(text, "episodes: 20"));
  CHECK(has_line_starting(text, "solver_mode: joint-mdp"));
}

TEST_CASE("the exported process file carries the stanza and the model") {
  Scratch scratch;
  const std::string sc = write_defense(scratch);
  const std::string out = scratch.file("export.txt");
  REQUIRE(run("export-pomdp --scenario " + sc + " --out " + out) == 0);
  const std::string text = slurp(out);
  CHECK(has_line_starting(text, "# command: export-pomdp"));
  CHECK(has_line_starting(text, "states: "));
  bool discount_ok = false;
  for (const std::string& line : lines_of(text))
    if (line.rfind("discount: ", 0) == 0)
      discount_ok = std::stod(line.substr(10)) == 0.95;
  CHECK(discount_ok);
}

TEST_CASE("usage errors exit with a failure code") {
  Scratch scratch;
  const std::string sc = write_defense(scratch);
  CHECK(run("solve --scenario " + sc + " --bogus-flag") != 0);
  CHECK(run("solve") != 0);
  CHECK(run("solve --scenario " + scratch.file("missing.json")) != 0);
}
