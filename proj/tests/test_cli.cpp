#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace igass;

namespace {

struct Output {
  int code;
  std::string out, err;
};

Output invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "igass");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("CSV header is exact") {
  CHECK(std::string(cli::kCsvHeader) ==
        "benchmark,formulation,degree,n_elems,slenderness,distortion_deg,raw_deflection,normalized_deflection,"
        "wall_time_s");
}

TEST_CASE("scordelis sweep: 3 formulations x 3 meshes, 17 significant digits") {
  const auto r = invoke({"run", "--benchmark", "scordelis", "--formulations", "ss,ss_ans,std", "--elems", "2,3,4",
                         "--deterministic"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == cli::kCsvHeader);
  const std::vector<std::string> order{"ss", "ss_ans", "std"};
  for (int i = 1; i < 10; ++i) {
    const auto f = fields(rows[i]);
    REQUIRE(f.size() == 9);
    CHECK(f[0] == "scordelis");
    CHECK(f[1] == order[(i - 1) % 3]);
    CHECK(f[2] == "2");
    CHECK(f[3] == std::to_string(2 + (i - 1) / 3));
    CHECK(f[8] == "0");
    // values round-trip exactly
    const double raw = std::strtod(f[6].c_str(), nullptr);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", raw);
    CHECK(f[6] == buf);
    CHECK(std::strtod(f[7].c_str(), nullptr) == doctest::Approx(raw / kScordelisReference).epsilon(1e-15));
  }
}

TEST_CASE("deterministic output is byte-stable and independent of the worker count") {
  const std::vector<std::string> args{"run", "-b", "straight", "-f", "ss,std", "-n", "4", "-s", "10,1000",
                                      "--deterministic"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(lines(a.out).size() == 5);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--jobs", "3"});
  CHECK(invoke(threaded).out == a.out);
}

TEST_CASE("beams default to the four slenderness values, shells ignore slenderness") {
  auto r = invoke({"run", "-b", "curved", "-f", "std", "-n", "2", "--deterministic"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(fields(rows[1])[4] == "10");
  CHECK(fields(rows[4])[4] == "10000");

  r = invoke({"run", "-b", "hemisphere", "-f", "ss", "-n", "2", "-s", "10,100", "--deterministic"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).size() == 2);
  CHECK(fields(lines(r.out)[1])[4] == "250");
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(invoke({"run", "-b", "roof"}).code == 2);
  CHECK(invoke({"run", "-b", "scordelis", "-f", "ans"}).code == 2);
  CHECK(invoke({"run", "-b", "scordelis", "-f", ""}).code == 2);
  CHECK(invoke({"run", "-b", "scordelis", "--precision", "quad"}).code == 2);
  CHECK(invoke({"run", "-b", "scordelis", "-n", "0"}).code == 2);
  CHECK(invoke({"run", "-b", "scordelis", "--continuity", "c1"}).code == 2);
  CHECK(invoke({"run"}).code != 0);
  CHECK(invoke({}).code != 0);
  const auto r = invoke({"run", "-b", "roof"});
  CHECK(r.err.find("unknown benchmark") != std::string::npos);
}

TEST_CASE("degree below the exact-geometry degree is a usage error") {
  CHECK(invoke({"run", "-b", "curved", "-p", "1", "-n", "2", "-s", "10"}).code == 2);
}

TEST_CASE("--continuity c0 changes the mesh") {
  const auto smooth = invoke({"run", "-b", "curved", "-f", "ss", "-n", "4", "-s", "1000", "--deterministic"});
  const auto c0 =
      invoke({"run", "-b", "curved", "-f", "ss", "-n", "4", "-s", "1000", "--continuity", "c0", "--deterministic"});
  REQUIRE(smooth.code == 0);
  REQUIRE(c0.code == 0);
  CHECK(fields(lines(smooth.out)[1])[6] != fields(lines(c0.out)[1])[6]);
}

TEST_CASE("IGA_SS_JOBS overrides --jobs") {
  ::setenv("IGA_SS_JOBS", "4", 1);
  CHECK(cli::resolve_jobs(1) == 4);
  ::setenv("IGA_SS_JOBS", "zero", 1);
  CHECK(cli::resolve_jobs(2) == 2);
  ::unsetenv("IGA_SS_JOBS");
  CHECK(cli::resolve_jobs(3) == 3);
  CHECK(cli::resolve_jobs(0) == 1);
}

TEST_CASE("--out writes the CSV to a file") {
  const auto path = std::filesystem::temp_directory_path() / "igass_cli_test.csv";
  const auto r = invoke({"run", "-b", "straight", "-f", "ss", "-n", "2", "-s", "100", "--deterministic", "--out",
                         path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(lines(content.str()).size() == 2);
  CHECK(lines(content.str())[0] == cli::kCsvHeader);
  std::filesystem::remove(path);
}

TEST_CASE("verify reports pass, and fail when the closed-form block is perturbed") {
  VerifyOptions options;
  options.random_elements = 20;
  std::ostringstream out;
  CHECK(cli::verify(options, out) == 0);
  CHECK(out.str().find("FAIL") == std::string::npos);

  options.closed_form_perturbation = 1e-10;
  std::ostringstream bad;
  CHECK(cli::verify(options, bad) == 1);
  CHECK(bad.str().find("FAIL") != std::string::npos);
}
