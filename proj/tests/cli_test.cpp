// Copyright 2026 The stcorridor Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stcorridor/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace stcorridor::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stcorridor_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(RunConfig cfg) {
    if (cfg.out_dir == "out") cfg.out_dir = (dir_ / "out").string();
    out_.str("");
    err_.str("");
    return dispatch(cfg, out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, VerifyPassesAndReportsCounterexample) {
  RunConfig cfg;
  cfg.subcommand = "verify";
  cfg.cases = 20;
  EXPECT_EQ(run(cfg), kOk);
  const std::string report = slurp(dir_ / "out" / "verify_report.txt");
  EXPECT_NE(report.find("passed=true"), std::string::npos);
  const auto pos = report.find("counterexample_violation=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_GT(std::stod(report.substr(pos + 25)), 1e-3);
}

TEST_F(CliTest, VerifyIsSeedReproducible) {
  RunConfig cfg;
  cfg.subcommand = "verify";
  cfg.cases = 10;
  cfg.seed = 9;
  cfg.out_dir = (dir_ / "a").string();
  ASSERT_EQ(run(cfg), kOk);
  cfg.out_dir = (dir_ / "b").string();
  ASSERT_EQ(run(cfg), kOk);
  EXPECT_EQ(slurp(dir_ / "a" / "verify_report.txt"), slurp(dir_ / "b" / "verify_report.txt"));
}

TEST_F(CliTest, VerifyRejectsCorruptScenario) {
  const fs::path bad = dir_ / "bad.yaml";
  std::ofstream(bad) << "ego: [unclosed\n";
  RunConfig cfg;
  cfg.subcommand = "verify";
  cfg.scenario = bad.string();
  EXPECT_NE(run(cfg), kOk);
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(CliTest, CoverageSlopesAndFlags) {
  RunConfig cfg;
  cfg.subcommand = "coverage";
  ASSERT_EQ(run(cfg), kOk);
  const std::string s = slurp(dir_ / "out" / "coverage_quadratic_summary.txt");
  const auto pos = s.find("slope_f_cpets=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(s.substr(pos + 14)), -2.0, 0.1);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "coverage_quadratic.csv"));

  cfg.bound = "affine";
  ASSERT_EQ(run(cfg), kOk);
  EXPECT_NE(out_.str().find("exact_cover=true"), std::string::npos);

  cfg.bound = "quadratic";
  cfg.degrees = {8};
  EXPECT_EQ(run(cfg), kUsage);
  cfg.degrees = {4, 8};
  cfg.bound = "cubic";
  EXPECT_EQ(run(cfg), kUsage);
}

TEST_F(CliTest, PlanWritesArtifacts) {
  RunConfig cfg;
  cfg.subcommand = "plan";
  ASSERT_EQ(run(cfg), kOk) << err_.str();
  for (const char* f : {"plan_convex.csv", "plan_convex.svg", "plan_trap.csv", "plan_trap.svg",
                        "plan_summary.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
}

TEST_F(CliTest, PlanUsageErrors) {
  RunConfig cfg;
  cfg.subcommand = "plan";
  cfg.variant = "hexagon";
  EXPECT_EQ(run(cfg), kUsage);
  cfg.variant.reset();
  cfg.degree = 2;
  EXPECT_EQ(run(cfg), kUsage);
  cfg.degree.reset();
  cfg.subcommand = "fly";
  EXPECT_EQ(run(cfg), kUsage);
}

TEST_F(CliTest, PlanInfeasibleHasOwnExitCode) {
  const fs::path sc = dir_ / "blocked.yaml";
  std::ofstream(sc) << "ego: {v: 10.0}\n"
                       "obstacles: [{position: 2.0, speed: 0.0, margin: 5.0}]\n";
  RunConfig cfg;
  cfg.subcommand = "plan";
  cfg.scenario = sc.string();
  EXPECT_EQ(run(cfg), kInfeasible);
}

TEST_F(CliTest, MissingFilesAndUnwritableOutput) {
  RunConfig cfg;
  cfg.subcommand = "sim";
  cfg.scenario = (dir_ / "missing.yaml").string();
  EXPECT_EQ(run(cfg), kIo);
  EXPECT_FALSE(err_.str().empty());

  std::ofstream(dir_ / "file") << "x";
  cfg.scenario.clear();
  cfg.subcommand = "coverage";
  cfg.out_dir = (dir_ / "file" / "sub").string();
  EXPECT_EQ(run(cfg), kIo);
}

TEST_F(CliTest, SimIsByteReproducible) {
  const fs::path sc = dir_ / "short.yaml";
  std::ofstream(sc) << std::ifstream(std::string(STCORRIDOR_SAMPLES_DIR) + "/cutin.yaml").rdbuf()
                    << "\n";
  std::string text = slurp(sc);
  text.replace(text.find("duration: 12.0"), 14, "duration: 3.0");
  std::ofstream(sc, std::ios::trunc) << text;

  RunConfig cfg;
  cfg.subcommand = "sim";
  cfg.scenario = sc.string();
  cfg.variant = "convex";
  cfg.out_dir = (dir_ / "a").string();
  ASSERT_EQ(run(cfg), kOk) << err_.str();
  cfg.out_dir = (dir_ / "b").string();
  ASSERT_EQ(run(cfg), kOk);
  const std::string a = slurp(dir_ / "a" / "sim_convex.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "sim_convex.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "sim.svg"));
}

}  // namespace
}  // namespace stcorridor::cli
