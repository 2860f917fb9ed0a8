/******************************************************************************
 * Copyright 2026 The Platoon Tuner Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("platoon_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string(PLATOON_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string scenario() { return std::string(PLATOON_SCENARIOS) + "/reference_setup.ini"; }

  fs::path dir_;
};

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

TEST_F(CliTest, GainLocusHeaderAndRows) {
  const auto r = run("gain-locus --scenario " + scenario());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "branch,kp,kd,dominant_real_part,min_damping");
  std::istringstream s(r.out);
  std::string line;
  int rows = -1;
  while (std::getline(s, line)) {
    ++rows;
  }
  EXPECT_EQ(rows, 175);
}

TEST_F(CliTest, UnplaceableLambdaIsRejected) {
  const auto sc = write("far.ini", "[performance]\nlambda_M = -4\n");
  const auto r = run("gain-locus --scenario " + sc.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("lambda_M"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, MansdReportAndVerifyRoundTrip) {
  const auto report = dir_ / "mansd.json";
  const auto r = run("mansd --scenario " + scenario() + " --kp 0.82 --kd 2.6 --out " + report.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(report));
  for (const char* k : {"status", "kp", "kd", "Delta", "delta_star", "theta", "certificate", "verification"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_EQ(j["Delta"].get<int>(), 5);
  EXPECT_EQ(j["certificate"]["P1"].size(), 16u);
  EXPECT_TRUE(j["verification"].contains("lambda_max_M0"));
  EXPECT_TRUE(j["verification"].contains("lambda_max_Mend"));

  const auto v = run("verify --scenario " + scenario() + " --kp 0.82 --kd 2.6 --certificate " + report.string());
  EXPECT_EQ(v.code, 0) << v.err;
  EXPECT_EQ(nlohmann::json::parse(v.out)["status"], "pass");

  auto bad = j;
  bad["certificate"]["p2"] = -1.0;
  const auto corrupted = write("bad.json", bad.dump());
  const auto f = run("verify --scenario " + scenario() + " --kp 0.82 --kd 2.6 --certificate " + corrupted.string());
  EXPECT_EQ(f.code, 1);
  EXPECT_NE(f.out.find("p2 positivity"), std::string::npos) << f.out;

  const auto over = run("verify --scenario " + scenario() + " --kp 0.82 --kd 2.6 --certificate " + report.string() +
                        " --Delta 8");
  EXPECT_EQ(over.code, 1);
}

TEST_F(CliTest, MalformedScenarioExitsTwo) {
  const auto sc = write("bad.ini", "[platoon]\nh = 0.7\nheadway = 1\n");
  const auto out = dir_ / "never.json";
  const auto r = run("mansd --scenario " + sc.string() + " --kp 0.82 --kd 2.6 --out " + out.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("headway"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, BadArgumentsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("mansd --kp 0 --kd 1").code, 2);
  EXPECT_EQ(run("mansd --scenario /nonexistent.ini --kp 1 --kd 1").code, 2);
  EXPECT_EQ(run("verify --kp 0.82 --kd 2.6 --certificate " + (dir_ / "missing.json").string()).code, 2);
}

TEST_F(CliTest, SimulateWritesThreeFiles) {
  const auto sc = write("short.ini", "[sim]\nt_end = 3\n[attack]\nkind = worst_case\nDelta = 2\n");
  const auto trace = dir_ / "run.csv";
  const auto r = run("simulate --scenario " + sc.string() + " --kp 0.82 --kd 2.6 --out " + trace.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(trace);
  EXPECT_EQ(first_line(csv).substr(0, 19), "t,q_0,v_0,a_0,u_0,e");
  EXPECT_EQ(first_line(slurp(dir_ / "run.events.csv")), "t,link,delivered");
  const auto m = nlohmann::json::parse(slurp(dir_ / "run.metrics.json"));
  EXPECT_EQ(m["links"].size(), 10u);
  EXPECT_LT(m["spacing_error_mismatch"].get<double>(), 1e-6);
}

TEST_F(CliTest, SimulateRejectsOverDeltaDrops) {
  const auto sc = write("drops.ini", "[sim]\nt_end = 3\n[attack]\nDelta = 1\ndrops = 1:3, 1:4\n");
  const auto trace = dir_ / "run.csv";
  const auto r = run("simulate --scenario " + sc.string() + " --kp 0.82 --kd 2.6 --out " + trace.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(trace));
}

TEST_F(CliTest, TuneOnSmallGrid) {
  const auto sc = write("small.ini", "[tuning]\nn_k1 = 3\nn_k2 = 1\ndelta_grid = geometric 0.01 100 41\n");
  const auto out = dir_ / "tune.json";
  const auto csv = dir_ / "cands.csv";
  const auto r = run("tune --scenario " + sc.string() + " --jobs 1 --out " + out.string() + " --locus-out " +
                     csv.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(out));
  for (const char* k : {"best_gains", "best_Delta", "branch", "certificate", "locus_table", "timing"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_EQ(j["locus_table"].size(), 4u);
  EXPECT_EQ(first_line(slurp(csv)), "branch,kp,kd,Delta,delta_star,outcome");
}

}  // namespace
