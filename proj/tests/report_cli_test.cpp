// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_util.hpp"

namespace mexec {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(MEXEC_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 512> buf;
  while (fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string program(const std::string& rel) { return std::string(MEXEC_PROGRAMS_DIR) + "/" + rel; }

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("mexec_test_" + name); }

nlohmann::json load_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

TEST(Report, FooFullySaturated) {
  CoverageReport rep = coverage_report(run_coverage(parse(testing::kFoo), SearchConfig{}));
  EXPECT_EQ(rep.branch_pct, 100.0);
  EXPECT_EQ(rep.line_pct, 100.0);
  EXPECT_EQ(rep.condition_pct, 100.0);
  ASSERT_TRUE(rep.call_pct);
  EXPECT_EQ(*rep.call_pct, 100.0);
  EXPECT_EQ(rep.branches_total, 4);
}

TEST(Report, KernelCos) {
  CoverageReport rep = coverage_report(run_coverage(testing::load("fdlibm/k_cos.mx"), SearchConfig{}));
  EXPECT_EQ(rep.branch_pct, 87.5);
  EXPECT_EQ(rep.line_pct, 100.0);
  EXPECT_EQ(rep.optimal_branch_pct, 100.0);
  EXPECT_FALSE(rep.call_pct);
  EXPECT_NE(render_text(rep).find("n/a"), std::string::npos);
}

TEST(Report, UninstrumentableExcludedFromDenominators) {
  Program p = parse("void FOO(real* p) { if (*p > 2.0) *p = 0.0; if (p != 0) *p = 1.0; }");
  CoverageReport rep = coverage_report(run_coverage(p, SearchConfig{}));
  EXPECT_EQ(rep.conditions_total, 1);
  EXPECT_EQ(rep.branches_total, 2);
  ASSERT_EQ(rep.uninstrumentable.size(), 1u);
  EXPECT_EQ(rep.uninstrumentable[0].label, 1);
  EXPECT_EQ(rep.branch_pct, 100.0);
}

TEST(Report, PercentagesInRange) {
  for (const char* rel : {"fdlibm/s_floor.mx", "fdlibm/e_log10.mx", "intro/foo_infeasible.mx"}) {
    CoverageReport rep = coverage_report(run_coverage(testing::load(rel), SearchConfig{}));
    for (double v : {rep.line_pct, rep.condition_pct, rep.branch_pct, rep.optimal_branch_pct}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 100.0);
    }
    EXPECT_GE(rep.optimal_branch_pct, rep.branch_pct);
  }
}

TEST(Report, JsonRoundTrip) {
  for (const char* rel : {"intro/foo.mx", "fdlibm/k_cos.mx", "fdlibm/s_floor.mx"}) {
    CoverageReport rep = coverage_report(run_coverage(testing::load(rel), SearchConfig{}));
    nlohmann::json j = rep;
    CoverageReport back = nlohmann::json::parse(j.dump()).get<CoverageReport>();
    EXPECT_EQ(back, rep) << rel;
  }
}

TEST(Report, RejectsOtherSchema) {
  nlohmann::json j = coverage_report(run_coverage(parse(testing::kFoo), SearchConfig{}));
  j["schema"] = "mexec/0";
  EXPECT_THROW(j.get<CoverageReport>(), Error);
}

TEST(Cli, CoverPrintsReport) {
  RunResult r = run_cli("cover " + program("intro/foo.mx") + " --entry FOO --seed 42");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("branch"), std::string::npos);
  EXPECT_NE(r.out.find("100.0%"), std::string::npos);
}

TEST(Cli, PathPrintsInput) {
  RunResult r = run_cli("path " + program("intro/foo.mx") + " --entry FOO --path 0T,1T");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(r.out.find("found: (-3)") != std::string::npos || r.out.find("found: (1)") != std::string::npos)
      << r.out;
}

TEST(Cli, ModeFlag) {
  RunResult r = run_cli(program("intro/foo.mx") + " --mode bva --n-start 20");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("boundary inputs"), std::string::npos);
}

TEST(Cli, MissingFileIsUsageError) {
  RunResult r = run_cli("cover missing.mx");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("missing.mx"), std::string::npos);
}

TEST(Cli, BadFlagsAreUsageErrors) {
  EXPECT_EQ(run_cli("cover " + program("intro/foo.mx") + " --n-start 0").code, 1);
  EXPECT_EQ(run_cli("cover " + program("intro/foo.mx") + " --box 5").code, 1);
  EXPECT_EQ(run_cli("cover " + program("intro/foo.mx") + " --entry BAR").code, 1);
  EXPECT_EQ(run_cli("path " + program("intro/foo.mx") + " --path 9T").code, 1);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST(Cli, ParseErrorExitsTwo) {
  fs::path bad = temp_file("bad.mx");
  std::ofstream(bad) << "void f(real x) { if (x < ) x = 1.0; }\n";
  RunResult r = run_cli("cover " + bad.string());
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("1:"), std::string::npos);
  fs::remove(bad);
}

TEST(Cli, SatMode) {
  RunResult r = run_cli("sat --constraint \"2^x <= 5 && x*x >= 5 && x >= 0\"");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("verdict: sat"), std::string::npos);
}

TEST(Cli, JsonIsDeterministicApartFromTiming) {
  fs::path a = temp_file("a.json"), b = temp_file("b.json");
  ASSERT_EQ(run_cli("cover " + program("fdlibm/s_atan.mx") + " --seed 3 --json " + a.string()).code, 0);
  ASSERT_EQ(run_cli("cover " + program("fdlibm/s_atan.mx") + " --seed 3 --json " + b.string()).code, 0);
  nlohmann::json ja = load_json(a), jb = load_json(b);
  EXPECT_EQ(ja["schema"], "mexec/1");
  ja.erase("wall_time");
  jb.erase("wall_time");
  EXPECT_EQ(ja.dump(), jb.dump());
  CoverageReport rep = load_json(a).get<CoverageReport>();
  EXPECT_EQ(rep.entry, "atan_approx");
  fs::remove(a);
  fs::remove(b);
}

TEST(Cli, SeedFromEnvironment) {
  fs::path a = temp_file("env.json"), b = temp_file("flag.json");
  std::string cmd = "MEXEC_SEED=11 " + std::string(MEXEC_CLI_PATH) + " cover " + program("fdlibm/s_atan.mx") +
                    " --json " + a.string() + " > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  ASSERT_EQ(run_cli("cover " + program("fdlibm/s_atan.mx") + " --seed 11 --json " + b.string()).code, 0);
  nlohmann::json ja = load_json(a), jb = load_json(b);
  EXPECT_EQ(ja["inputs"], jb["inputs"]);
  fs::remove(a);
  fs::remove(b);
}

TEST(Cli, EmitInstrumented) {
  RunResult r = run_cli("cover " + program("intro/foo.mx") + " --emit-instrumented --n-start 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("FOO_I"), std::string::npos);
  EXPECT_NE(r.out.find("FOO_R"), std::string::npos);
}

}  // namespace
}  // namespace mexec
