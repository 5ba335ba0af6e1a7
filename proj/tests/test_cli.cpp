#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(DIRAC_KIT_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("list-systems") == 0);
  CHECK(run("analyze --system heisenberg_particle --samples 16 --out " + tmp("dk_h.json")) == 0);
  CHECK(run("analyze --system chaplygin_skate --action SE2 --samples 16 --out " + tmp("dk_s.json")) == 1);
  CHECK(run("analyze --system nowhere --out -") == 2);
  CHECK(run("analyze --system vertical_disk --params R=-1 --out -") == 2);
  CHECK(run("analyze --system vertical_disk --params R --out -") == 2);
  CHECK(run("analyze --system vertical_disk --action SO3 --out -") == 2);
  CHECK(run("custom --file /nonexistent.json --out -") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("export then custom reproduces the built-in analysis") {
  const std::string spec = tmp("dk_disk_spec.json");
  REQUIRE(run("export --system vertical_disk --params I=2 --out " + spec) == 0);
  REQUIRE(run("custom --file " + spec + " --samples 12 --out " + tmp("dk_c.json")) == 0);
  REQUIRE(run("analyze --system vertical_disk --params I=2 --samples 12 --out " + tmp("dk_a.json")) == 0);
  CHECK(slurp(tmp("dk_c.json")) == slurp(tmp("dk_a.json")));
}

TEST_CASE("rank aborts exit with 3 and write the abort record") {
  const std::string spec = tmp("dk_rank.json");
  std::ofstream(spec) << R"({"name": "singular_block", "chart": ["x", "y", "z"], "box": [[-1, 1], [-1, 1], [-1, 1]],
    "metric": [["1","0","0"],["0","1","0"],["0","0","1"]], "constraints": [["1", "0", "0"]],
    "eliminate": ["p_z"]})";
  const std::string out = tmp("dk_rank_out.json");
  std::filesystem::remove(out);
  CHECK(run("custom --file " + spec + " --out " + out) == 3);
  const std::string text = slurp(out);
  CHECK(text.find("\"aborted\"") != std::string::npos);
  CHECK(text.find("build_constraint_phase") != std::string::npos);
}
