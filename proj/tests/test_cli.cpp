#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "catmap/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = catmap::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("order") {
  const Run r = run({"order", "--matrix", "2,1,3,2", "-N", "55"});
  CHECK(r.code == 0);
  CHECK(r.out == "30\n");
  const Run bad = run({"order", "--matrix", "1,1,0,1", "-N", "7"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("NotHyperbolic") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"order"}).code == 2);
  CHECK(run({"sweep", "--N", "9..3"}).code == 2);
  CHECK(run({"census-primes", "--format", "xml"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("validation errors exit 1") {
  CHECK(run({"census-primes", "--eta", "0.7"}).code == 1);
  CHECK(run({"nu", "-N", "5", "--n", "5,5"}).code == 1);
}

TEST_CASE("JSON documents embed their configuration") {
  const Run r = run({"fourth-moment", "-N", "7"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["config"]["command"] == "fourth-moment");
  CHECK(j["config"]["N"] == "7");
  CHECK(j["nu"] == 168);
  CHECK(j["holds"] == true);
}

TEST_CASE("census to file, summary to stdout, replay reproduces bytes") {
  const fs::path dir = fs::temp_directory_path() / "catmap-cli-test";
  fs::create_directories(dir);
  const Run r = run({"census-integers", "--x", "2000", "--out", (dir / "a.csv").string(), "--workers", "1"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["x"] == 2000);
  const Run p = run({"census-integers", "--x", "2000", "--out", (dir / "b.csv").string(), "--workers", "3"});
  REQUIRE(p.code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  const Run again = run({"replay", (dir / "a.csv").string(), "--out", (dir / "c.csv").string()});
  REQUIRE(again.code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "c.csv"));
  fs::remove_all(dir);
}

TEST_CASE("check --quick exits 0") {
  const Run r = run({"check", "--quick"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
