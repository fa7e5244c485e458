#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cli.hpp"

using namespace reccoord;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "reccoord");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("reccoord_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("generator option parsing") {
  const SyntheticConfig c = cli::parse_generate_options("members=4,ev=0.5,dt=1");
  CHECK(c.members == 4);
  CHECK(c.ev_rate == 0.5);
  CHECK(c.dt_hours == 1.0);
  CHECK_THROWS_AS(cli::parse_generate_options("colour=3"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_generate_options("members=four"), std::invalid_argument);
}

TEST_CASE("smoke run writes one summary column per mode") {
  const fs::path out = scratch("smoke");
  const Result r = run({"run", "--generate", "members=4,dt=1", "--seed", "7", "--modes",
                        "solofix,ecfix", "--days", "1", "--out", out.string()});
  INFO(r.err);
  CHECK(r.code == cli::kOk);
  CHECK(first_line(out / "summary.csv") == "metric,SoloFix,ECFix");
  CHECK(fs::exists(out / "schedules.csv"));
  fs::remove_all(out);
}

TEST_CASE("decentralized run with the gap rows") {
  const fs::path out = scratch("gap");
  const Result r = run({"run", "--generate", "members=4,dt=1", "--seed", "3", "--modes",
                        "solofix,ecflex,ecflexit", "--key", "cascade", "--out", out.string(),
                        "--trace"});
  INFO(r.err);
  REQUIRE(r.code == cli::kOk);
  std::ifstream in(out / "summary.csv");
  std::string line;
  bool gap = false;
  while (std::getline(in, line)) gap = gap || line.rfind("gap,", 0) == 0;
  CHECK(gap);
  CHECK(fs::file_size(out / "trace.jsonl") > 0);
  fs::remove_all(out);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"run", "--generate", "members=3", "--modes", "ecflexit", "--key", "lottery"}).code ==
        cli::kUsage);
  CHECK(run({"run", "--generate", "members=3", "--modes", "ecflexit"}).code == cli::kUsage);
  CHECK(run({"run", "--generate", "members=3", "--modes", "nonsense"}).code == cli::kUsage);
  CHECK(run({"run", "--scenario", "/nonexistent/file.json"}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
}

TEST_CASE("generate then run from the file, then resume") {
  const fs::path dir = scratch("gen");
  fs::create_directories(dir);
  const fs::path file = dir / "s.json";
  REQUIRE(run({"generate", "members=3,dt=1", "--seed", "4", "--days", "2", "-o", file.string()})
              .code == cli::kOk);
  const std::vector<std::string> args{"run",    "--scenario", file.string(), "--modes",
                                      "ecflex", "--days",     "2",           "--out",
                                      (dir / "out").string()};
  REQUIRE(run(args).code == cli::kOk);
  std::ifstream s1(dir / "out" / "schedules.csv");
  std::stringstream first;
  first << s1.rdbuf();
  std::vector<std::string> resume = args;
  resume.push_back("--resume");
  REQUIRE(run(resume).code == cli::kOk);
  std::ifstream s2(dir / "out" / "schedules.csv");
  std::stringstream second;
  second << s2.rdbuf();
  CHECK(first.str() == second.str());
  CHECK(run({"run", "--scenario", file.string(), "--dt", "0.25"}).code == cli::kUsage);
  fs::remove_all(dir);
}
