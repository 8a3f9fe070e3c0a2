#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using nktoric::cli::main_entry;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nktoric");
  std::ostringstream out, err;
  const int code = main_entry(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("nktoric_test_" + name); }

// Drops the command_line metadata, which records the output file name.
std::string without_command_line(const std::string& text) {
  std::istringstream in(text);
  std::string line, kept;
  while (std::getline(in, line)) {
    if (line.find("command_line") == std::string::npos) kept += line + "\n";
  }
  return kept;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("verify") {
    const Result ok = run_cli({"verify", "--phi", std::string(NKTORIC_DATA_DIR) + "/phi0.txt"});
    CHECK(ok.code == 0);
    CHECK(ok.out == "residual: 0 (exact)\n");
    CHECK(run_cli({"verify"}).code == 0);
    const Result bad = run_cli({"verify", "--phi", "3 + mu1^2"});
    CHECK(bad.code == 1);
    CHECK(bad.out.rfind("residual: ", 0) == 0);
    CHECK(bad.out != "residual: 0 (exact)\n");
  }

  TEST_CASE("verify writes a JSON report") {
    const fs::path p = temp_path("verify.json");
    REQUIRE(run_cli({"verify", "--out", p.string()}).code == 0);
    const json doc = json::parse(read_file(p));
    CHECK(doc["exact_zero"] == true);
    CHECK(doc["residual"] == "0");
    CHECK(doc["meta"]["tool"] == "nktoric");
    CHECK(doc["meta"]["seed"] == 1);
    fs::remove(p);
  }

  TEST_CASE("singular orbits") {
    const Result r = run_cli({"singular-orbits"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["count"] == 4);
    CHECK(doc["orbits"].size() == 4);
    const Result csv = run_cli({"singular-orbits", "--format", "csv"});
    REQUIRE(csv.code == 0);
    CHECK(csv.out.find("mu1,mu2,mu3,eps2,cvv\n") != std::string::npos);
  }

  TEST_CASE("errors map to exit code 2") {
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({}).code == 2);
    const Result malformed = run_cli({"verify", "--phi", "3 + mu4^"});
    CHECK(malformed.code == 2);
    CHECK(malformed.err.find("malformed polynomial") != std::string::npos);
    const Result missing = run_cli({"verify", "--phi", "/nonexistent/phi.txt"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("cannot read") != std::string::npos);
    CHECK(run_cli({"verify", "--format", "csv"}).code == 2);
    CHECK(run_cli({"verify", "--format", "xml"}).code == 2);
    CHECK(run_cli({"search", "--degree", "7"}).code == 2);
    CHECK(run_cli({"radial", "--x0", "4"}).code == 2);
    CHECK(run_cli({"verify", "--tol", "-1"}).code == 2);
    CHECK(run_cli({"verify", "--bogus"}).code == 2);
  }

  TEST_CASE("help") {
    const Result r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("singular-orbits") != std::string::npos);
  }

  TEST_CASE("config file with flag precedence") {
    const fs::path cfg = temp_path("search.ini");
    {
      std::ofstream f(cfg);
      f << "starts=5\nseed=17\ndegree=3\n";
    }
    const Result from_file = run_cli({"search", "--config", cfg.string()});
    REQUIRE(from_file.code == 0);
    const json a = json::parse(from_file.out);
    CHECK(a["starts"] == 5);
    CHECK(a["seed"] == 17);
    const Result overridden = run_cli({"search", "--config", cfg.string(), "--seed", "23"});
    REQUIRE(overridden.code == 0);
    const json b = json::parse(overridden.out);
    CHECK(b["starts"] == 5);
    CHECK(b["seed"] == 23);
    fs::remove(cfg);
  }

  TEST_CASE("output is byte-identical across runs and job counts") {
    const fs::path a = temp_path("a.json"), b = temp_path("b.json"), c = temp_path("c.json");
    REQUIRE(run_cli({"search", "--starts", "12", "--seed", "5", "--out", a.string()}).code == 0);
    REQUIRE(run_cli({"search", "--starts", "12", "--seed", "5", "--out", b.string()}).code == 0);
    REQUIRE(run_cli({"search", "--starts", "12", "--seed", "5", "--jobs", "3", "--out", c.string()}).code == 0);
    CHECK(without_command_line(read_file(a)) == without_command_line(read_file(b)));
    CHECK(without_command_line(read_file(a)) == without_command_line(read_file(c)));
    const Result s1 = run_cli({"sweep", "--grid", "3"});
    const Result s2 = run_cli({"sweep", "--grid", "3", "--jobs", "2"});
    CHECK(without_command_line(s1.out) == without_command_line(s2.out));
    for (const auto& p : {a, b, c}) fs::remove(p);
  }

  TEST_CASE("metadata and CSV precision") {
    const Result r = run_cli({"radial", "--format", "csv", "--tol", "1e-8"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# tool: nktoric") != std::string::npos);
    CHECK(r.out.find("# seed: 1") != std::string::npos);
    CHECK(r.out.find("# command_line: nktoric radial --format csv --tol 1e-8") != std::string::npos);
    CHECK(r.out.find("t,x,xp,eps2\n") != std::string::npos);
    CHECK(nktoric::cli::format_double(0.1) == "0.10000000000000001");
    CHECK(nktoric::cli::format_double(2.0) == "2");
    CHECK(std::stod(nktoric::cli::format_double(1.0 / 3.0)) == 1.0 / 3.0);

    const Result j = run_cli({"radial", "--tol", "1e-8"});
    REQUIRE(j.code == 0);
    const json doc = json::parse(j.out);
    CHECK(doc["forward"]["termination"] == "EPS2_ZERO");
    CHECK(doc["backward"]["termination"] == "T_ZERO_SINGULARITY");
    CHECK(doc["bounds"]["upper_holds"] == true);
    CHECK(doc["meta"]["tolerances"].contains("integrator"));
    CHECK_FALSE(doc["meta"]["tolerances"].contains("max_step"));
  }

  TEST_CASE("region, spectrum, surface and lemmas") {
    const Result region = run_cli({"region", "--samples", "500"});
    CHECK(region.code == 0);
    CHECK(json::parse(region.out)["counterexamples"].empty());
    CHECK(run_cli({"spectrum", "--samples", "20"}).code == 0);
    const Result surface = run_cli({"surface", "--directions", "50"});
    REQUIRE(surface.code == 0);
    CHECK(json::parse(surface.out)["count"] == 60);
    CHECK(run_cli({"lemmas", "--samples", "50"}).code == 0);
  }
}
