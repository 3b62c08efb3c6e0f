#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "steerkit/states.hpp"
#include "steerkit/stats.hpp"

using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string errfile =
      "steerkit_cli_stderr_" + std::to_string(counter++) + ".txt";
  const std::string cmd =
      std::string(STEERKIT_CLI_PATH) + " " + args + " 2>" + errfile;
  CliResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
  const int status = pclose(pipe);
  if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
  std::ifstream err(errfile);
  std::stringstream ss;
  ss << err.rdbuf();
  result.err = ss.str();
  std::remove(errfile.c_str());
  return result;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("steerkit_cli_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("version and usage") {
  const CliResult version = run_cli("--version");
  CHECK(version.code == 0);
  CHECK(version.out.find("0.1.0") != std::string::npos);

  CHECK(run_cli("").code == 2);             // subcommand required
  CHECK(run_cli("frobnicate").code == 2);   // unknown subcommand
  CHECK(run_cli("classify --p 0.5").code == 2);  // missing --theta
}

TEST_CASE("classify labels") {
  const CliResult oneway =
      run_cli("classify --p 0.6 --theta 0.2618 --format json");
  REQUIRE(oneway.code == 0);
  const json j = json::parse(oneway.out);
  CHECK(j["three_settings"] == "OneWayAtoB");
  CHECK(j["two_settings"] == "Unsteerable");
  CHECK(j["infinite_settings"] == "OneWayAtoB");
  CHECK(j["bowles_unsteerable_b_to_a"] == true);

  const CliResult dull = run_cli("classify --p 0.5 --theta 0.3");
  REQUIRE(dull.code == 0);
  CHECK(dull.out.find("two_settings: Unsteerable") != std::string::npos);
  CHECK(dull.out.find("three_settings: Unsteerable") != std::string::npos);
  CHECK(dull.out.find("infinite_settings: Unsteerable") != std::string::npos);

  // 0.7854 is pi/4 rounded up; the CLI forgives the rounding.
  const CliResult bell =
      run_cli("classify --p 1 --theta 0.7854 --format json");
  REQUIRE(bell.code == 0);
  const json jb = json::parse(bell.out);
  CHECK(jb["two_settings"] == "TwoWay");
  CHECK(jb["three_settings"] == "TwoWay");
  CHECK(jb["infinite_settings"] == "TwoWay");

  // Degrees flag: 15 degrees = pi/12.
  const CliResult degrees =
      run_cli("classify --p 0.6 --theta 15 --degrees --format json");
  REQUIRE(degrees.code == 0);
  CHECK(json::parse(degrees.out)["three_settings"] == "OneWayAtoB");
}

TEST_CASE("errors carry kinds and exit code 2") {
  const CliResult bad = run_cli("classify --p 1.5 --theta 0.3");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("ParamError") != std::string::npos);

  const CliResult as_json =
      run_cli("classify --p 1.5 --theta 0.3 --json-errors");
  CHECK(as_json.code == 2);
  const json j = json::parse(as_json.err);
  CHECK(j["error"] == "ParamError");
  CHECK(j["exit_code"] == 2);

  const CliResult missing = run_cli("radius --state-file no_such_file.json");
  CHECK(missing.code == 2);
  CHECK(missing.err.find("ParseError") != std::string::npos);
}

TEST_CASE("radius finds the Bell values") {
  const CliResult res = run_cli(
      "radius --p 1 --theta 0.7854 --k 3 --direction ab --restarts 2");
  REQUIRE(res.code == 0);
  const json j = json::parse(res.out);
  CHECK(std::abs(j["R"].get<double>() - 1.7320508) <= 3e-3);
  CHECK(j["steerable"] == true);
  CHECK(j["k"] == 3);
  CHECK(j["direction"] == "ab");
  CHECK(j["best_settings"].size() == 3);
  CHECK(j["restart_values"].size() == 2);
}

TEST_CASE("radius respects the unsteerable direction") {
  const CliResult res = run_cli(
      "radius --p 0.6 --theta 0.2618 --k 3 --direction ba --restarts 2");
  REQUIRE(res.code == 0);
  const json j = json::parse(res.out);
  CHECK(j["R"].get<double>() <= 1.0 + 1e-3);
  CHECK(j["steerable"] == false);
}

TEST_CASE("radius reads state files and dumps assemblages") {
  TempFile state("product_state.json");
  steerkit::save_state(steerkit::make_family_state(0.0, 0.5235987755982988),
                       state.path);  // theta = pi/6
  const CliResult res = run_cli("radius --state-file " + state.path +
                                " --k 2 --direction ab --restarts 2 "
                                "--dump-assemblage");
  REQUIRE(res.code == 0);
  const json j = json::parse(res.out);
  CHECK(std::abs(j["R"].get<double>() - 0.5) <= 5e-3);  // cos(pi/3)
  CHECK(j["steerable"] == false);
  REQUIRE(j.contains("assemblage"));
  CHECK(j["assemblage"]["members"].size() == 4);
}

TEST_CASE("scan-region emits a well-formed deterministic grid") {
  const std::string cmd =
      "scan-region --theta-min 0.785398163 --theta-max 0.785398163 "
      "--theta-steps 1 --p-steps 200";
  const CliResult res = run_cli(cmd);
  REQUIRE(res.code == 0);
  const auto lines = lines_of(res.out);
  REQUIRE(lines.size() == 202);  // comment + header + 200 rows
  CHECK(lines[0].rfind("# steerkit", 0) == 0);
  CHECK(lines[1] == "p,theta,label2,label3,bowles_unsteerable");
  for (std::size_t i = 2; i < lines.size(); ++i) {
    CHECK(lines[i].find("OneWayAtoB") == std::string::npos);
  }

  const CliResult rerun = run_cli(cmd);
  CHECK(rerun.out == res.out);
}

TEST_CASE("scan-region boundary row flips the three-setting label") {
  // 1/sqrt(3) = 0.57735...: straddle it with two p values at fixed theta.
  const CliResult res = run_cli(
      "scan-region --p-min 0.575 --p-max 0.58 --p-steps 2 "
      "--theta-min 0.2618 --theta-max 0.2618 --theta-steps 1");
  REQUIRE(res.code == 0);
  const auto lines = lines_of(res.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[2].find("Unsteerable") != std::string::npos);
  CHECK(lines[3].find("OneWayAtoB") != std::string::npos);
}

TEST_CASE("scan-linear reports sorted witness rows") {
  const CliResult res =
      run_cli("scan-linear --p 0.6 --theta 0.2618 --n 10,2,3,4,6");
  REQUIRE(res.code == 0);
  const auto lines = lines_of(res.out);
  REQUIRE(lines.size() == 7);  // comment + header + 5 rows
  CHECK(lines[1] == "n,S,C,S_minus_C");
  int previous = 0;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    std::stringstream row(lines[i]);
    std::string field;
    std::getline(row, field, ',');
    const int n = std::stoi(field);
    CHECK(n > previous);
    previous = n;
    std::getline(row, field, ',');
    std::getline(row, field, ',');
    std::getline(row, field, ',');
    CHECK(std::stod(field) <= 0.0);  // Bowles-shielded point: S_n <= C_n
  }

  const CliResult bell = run_cli(
      "scan-linear --p 1 --theta 0.7854 --n 3 --format json");
  REQUIRE(bell.code == 0);
  const json j = json::parse(bell.out);
  REQUIRE(j["rows"].size() == 1);
  const double gap = j["rows"][0]["S_minus_C"].get<double>();
  CHECK(std::abs(gap - (1.0 - 0.5773502691896258)) <= 1e-12);
}

TEST_CASE("simulate produces a bootstrap summary and count files") {
  TempFile counts("sim_counts.csv");
  const CliResult res = run_cli(
      "simulate --p 0.8 --theta 0.5 --k 2 --counts 5000 --resamples 10 "
      "--seed 3 --counts-out " + counts.path);
  REQUIRE(res.code == 0);
  const json j = json::parse(res.out);
  CHECK(j["resamples"] == 10);
  CHECK(j["mean_R"].get<double>() > 0.0);
  CHECK(j["std_R"].get<double>() >= 0.0);
  CHECK(j["point_R"].get<double>() > 0.0);
  CHECK(std::abs(j["total_counts"].get<double>() - 5000) < 500);

  const steerkit::CountRecord loaded = steerkit::load_counts(counts.path);
  CHECK(loaded.setting_count() == 2);
  CHECK(loaded.total() == doctest::Approx(j["total_counts"].get<double>()));
}

TEST_CASE("output files are written atomically") {
  TempFile out("radius_out.json");
  const CliResult res = run_cli(
      "radius --p 0.9 --theta 0.7 --k 2 --restarts 1 --out " + out.path);
  REQUIRE(res.code == 0);
  CHECK(res.out.empty());
  std::ifstream file(out.path);
  REQUIRE(file.good());
  json j;
  file >> j;
  CHECK(j["command"] == "radius");
  std::ifstream tmp(out.path + ".tmp");
  CHECK_FALSE(tmp.good());
}
