#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string cli_path() {
  const char* p = std::getenv("PHK_CLI_BIN");
  REQUIRE(p != nullptr);
  return p;
}

int run_cli(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / "phk_e2e" / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

void write(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("every subcommand runs twice with byte-identical outputs") {
  auto base = fresh_dir("determinism");
  // small configs keep the loop quick; bubble-scan gets a coarse family
  write(base / "decay.json", R"({"length":6,"resolution":[301,32]})");
  write(base / "strip.json", R"({"betas":[0.7853981633974483],"N":200})");
  write(base / "cauchy.json", R"({"resolution":33})");
  write(base / "dbar.json", R"({"resolution":33,"deviation":0.1})");
  write(base / "three.json", R"({"alphas":[0.5,1.0],"grid":8})");
  write(base / "bubble.json", R"({"resolution":129,"members":4})");
  write(base / "corner.json", R"({"levels":3})");

  struct Job {
    const char* sub;
    std::string cfg;
  };
  std::vector<Job> jobs = {{"collar", ""},
                           {"plumb", ""},
                           {"cauchy", (base / "cauchy.json").string()},
                           {"dbar-solve", (base / "dbar.json").string()},
                           {"decay", (base / "decay.json").string()},
                           {"strip-eigen", (base / "strip.json").string()},
                           {"three-strips", (base / "three.json").string()},
                           {"bubble-scan", (base / "bubble.json").string()},
                           {"corner", (base / "corner.json").string()}};
  for (const auto& job : jobs) {
    auto d1 = fresh_dir(std::string(job.sub) + "_1");
    auto d2 = fresh_dir(std::string(job.sub) + "_2");
    std::string cfg = job.cfg.empty() ? "" : (" --config " + job.cfg);
    REQUIRE(run_cli(std::string(job.sub) + cfg + " --svg --out " + d1.string()) == 0);
    REQUIRE(run_cli(std::string(job.sub) + cfg + " --svg --out " + d2.string()) == 0);
    int compared = 0;
    for (const auto& entry : std::filesystem::directory_iterator(d1)) {
      auto other = d2 / entry.path().filename();
      REQUIRE(std::filesystem::exists(other));
      INFO(job.sub << ": " << entry.path().filename());
      REQUIRE(slurp(entry.path().string()) == slurp(other.string()));
      ++compared;
    }
    REQUIRE(compared >= 1);
  }
}

TEST_CASE("exit codes distinguish configuration, numerical and io failures") {
  auto base = fresh_dir("exitcodes");

  // invalid configuration: malformed json
  write(base / "broken.json", "{not json");
  REQUIRE(run_cli("collar --config " + (base / "broken.json").string() + " --out " +
                  (base / "o1").string()) == 1);

  // invalid configuration: bad parameter value
  write(base / "badres.json", R"({"resolution":10})");
  REQUIRE(run_cli("cauchy --config " + (base / "badres.json").string() + " --out " +
                  (base / "o2").string()) == 1);

  // numerical failure: the solver cannot converge in two iterations at a
  // near-critical structure deviation
  write(base / "stiff.json", R"({"resolution":33,"deviation":0.95,"max_iter":2,"tol":1e-12})");
  REQUIRE(run_cli("dbar-solve --config " + (base / "stiff.json").string() + " --out " +
                  (base / "o3").string()) == 2);

  // io failure: the output directory collides with an existing file
  write(base / "blocked", "file");
  REQUIRE(run_cli("collar --out " + (base / "blocked").string()) == 3);

  // success path sanity
  REQUIRE(run_cli("collar --out " + (base / "ok").string()) == 0);
}
