/* Copyright 2026 The ConfReach Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "core/image_io.hpp"
#include "core/model.hpp"
#include "support/test_support.hpp"

namespace confreach {
namespace {

using nlohmann::json;
using testing::read_bytes;
using testing::TempDir;
namespace fs = std::filesystem;

// Files whose content legitimately depends on wall-clock time.
bool is_timing_file(const std::string& name) {
  return name == "manifest.json" || name == "sweep_timing.csv" ||
         name.ends_with("/manifest.json");
}

std::vector<std::pair<std::string, std::string>> primary_outputs(const std::string& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& [name, bytes] : testing::snapshot_dir(dir)) {
    if (!is_timing_file(name)) out.emplace_back(name, bytes);
  }
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    save_model(testing::segmentation_toy_model(), dir_.file("model.mlp"));
    save_pnm(dir_.file("image.pgm"), testing::two_bright_pixel_image());
    ImageTensor dim = testing::two_bright_pixel_image();
    dim.at(0, 1, 0) = 0.7;
    save_pnm(dir_.file("image2.pgm"), dim);
  }

  // Runs the CLI, capturing combined output into `log`.
  int cli(const std::string& args, std::string* log = nullptr) {
    const std::string log_path = dir_.file("cli.log");
    const int rc = testing::run_command(std::string(CONFREACH_CLI_PATH) + " " + args + " > " +
                                        log_path + " 2>&1");
    if (log != nullptr) *log = read_bytes(log_path);
    return rc;
  }

  std::string verify_args(const std::string& out) const {
    return "verify --model " + dir_.file("model.mlp") + " --image " + dir_.file("image.pgm") +
           " --attack darkening --e 0.1 --fraction 1 --mode surrogate --m 400 --epsilon 0.01"
           " --seed 5 --out " + out;
  }

  TempDir dir_;
};

TEST_F(CliTest, GuaranteePrintsDelta2) {
  std::string log;
  ASSERT_EQ(cli("guarantee --m 100000 --ell 99999 --epsilon 1e-4", &log), 0) << log;
  EXPECT_NE(log.find("delta2     0.999500805"), std::string::npos) << log;
  ASSERT_EQ(cli("guarantee --m 8000 --ell 7999 --epsilon 1e-3", &log), 0);
  EXPECT_NE(log.find("delta2     0.99699"), std::string::npos) << log;
}

TEST_F(CliTest, UsageErrorsExitWithTwo) {
  EXPECT_EQ(cli("guarantee --m 10 --ell 0 --epsilon 0.1"), 2);
  EXPECT_EQ(cli("guarantee --m 10 --ell 11 --epsilon 0.1"), 2);
  EXPECT_EQ(cli("guarantee --m 10 --epsilon 1.5"), 2);
  EXPECT_EQ(cli("guarantee --epsilon 0.1"), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli(""), 2);
  EXPECT_EQ(cli("--help"), 0);
  EXPECT_EQ(cli("verify --model " + dir_.file("nope.mlp") + " --image " + dir_.file("image.pgm") +
                " --e 0.1 --out " + dir_.file("x")),
            2);
  EXPECT_EQ(cli("sweep --model " + dir_.file("model.mlp") + " --values 0.1 --out " +
                dir_.file("x")),
            2);  // no images
}

TEST_F(CliTest, DataErrorsExitWithThree) {
  std::ofstream(dir_.file("broken.mlp")) << "MLP v1 1 16\n";
  EXPECT_EQ(cli("verify --model " + dir_.file("broken.mlp") + " --image " +
                dir_.file("image.pgm") + " --e 0.1 --out " + dir_.file("x")),
            3);
  // Threshold above every pixel: nothing to darken.
  std::string log;
  EXPECT_EQ(cli("verify --model " + dir_.file("model.mlp") + " --image " + dir_.file("image.pgm") +
                    " --e 0.1 --threshold 0.99 --out " + dir_.file("x"),
                &log),
            3);
  EXPECT_NE(log.find("stage 'perturbation'"), std::string::npos) << log;
}

TEST_F(CliTest, DegenerateAttackGivesFullRobustness) {
  const std::string out = dir_.file("zero");
  std::string log;
  ASSERT_EQ(cli("verify --model " + dir_.file("model.mlp") + " --image " + dir_.file("image.pgm") +
                    " --attack linf --e 0 --m 100 --epsilon 0.05 --out " + out,
                &log),
            0)
      << log;
  EXPECT_NE(log.find("RV = 100.000000"), std::string::npos) << log;
  const json summary = json::parse(read_bytes(out + "/summary.json"));
  EXPECT_EQ(summary.at("rv").get<double>(), 100.0);
  const json manifest = json::parse(read_bytes(out + "/manifest.json"));
  EXPECT_EQ(manifest.at("command"), "verify");
  EXPECT_EQ(manifest.at("config_digest").get<std::string>().size(), 16u);
  EXPECT_TRUE(manifest.at("timing").is_object());
  EXPECT_TRUE(fs::exists(out + "/status.pgm"));
}

TEST_F(CliTest, VerifyReplayIsByteIdenticalAcrossThreadCounts) {
  const std::string first = dir_.file("v1");
  ASSERT_EQ(cli("--threads 1 " + verify_args(first)), 0);
  const std::string second = dir_.file("v2");
  ASSERT_EQ(cli("--threads 3 replay --manifest " + first + "/manifest.json --out " + second), 0);
  EXPECT_EQ(primary_outputs(first), primary_outputs(second));
  const json m1 = json::parse(read_bytes(first + "/manifest.json"));
  const json m2 = json::parse(read_bytes(second + "/manifest.json"));
  EXPECT_EQ(m1.at("config_digest"), m2.at("config_digest"));
}

TEST_F(CliTest, SinglePointSweepMatchesVerify) {
  const std::string v = dir_.file("v");
  std::string log;
  ASSERT_EQ(cli(verify_args(v)), 0);
  const double rv = json::parse(read_bytes(v + "/summary.json")).at("rv").get<double>();
  const std::string s = dir_.file("s");
  ASSERT_EQ(cli("sweep --model " + dir_.file("model.mlp") + " --images " + dir_.file("image.pgm") +
                    " --param e --values 0.1 --attack darkening --fraction 1 --mode surrogate"
                    " --m 400 --epsilon 0.01 --seed 5 --out " + s,
                &log),
            0)
      << log;
  const std::string csv = read_bytes(s + "/sweep.csv");
  char expected[64];
  std::snprintf(expected, sizeof expected, "e,0.10000000000000001,%.17g,1,0,", rv);
  EXPECT_NE(csv.find(expected), std::string::npos) << csv;
  EXPECT_TRUE(fs::exists(s + "/sweep_timing.csv"));
}

TEST_F(CliTest, SweepRecordsPartialFailures) {
  // e = 0.75 exceeds the 0.7 pixel of the second image but not the first.
  const std::string s = dir_.file("s");
  std::string log;
  ASSERT_EQ(cli("sweep --model " + dir_.file("model.mlp") + " --images " + dir_.file("image.pgm") +
                    "," + dir_.file("image2.pgm") + " --param e --values 0.05,0.75 --m 200"
                    " --epsilon 0.02 --out " + s,
                &log),
            0)
      << log;
  const std::string csv = read_bytes(s + "/sweep.csv");
  EXPECT_NE(csv.find(",2,0,\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find(",1,1,\""), std::string::npos) << csv;
}

TEST_F(CliTest, AuditIsReproducible) {
  const std::string run = dir_.file("run");
  ASSERT_EQ(cli(verify_args(run)), 0);
  std::string log;
  ASSERT_EQ(cli("audit --run-dir " + run + " --samples 3000 --seed 4 --out " + dir_.file("a1"), &log),
            0)
      << log;
  ASSERT_EQ(cli("--threads 2 audit --run-dir " + run + " --samples 3000 --seed 4 --out " +
                dir_.file("a2")),
            0);
  EXPECT_EQ(read_bytes(dir_.file("a1/audit.json")), read_bytes(dir_.file("a2/audit.json")));
  const json report = json::parse(read_bytes(dir_.file("a1/audit.json")));
  if (report.at("outside").get<int>() == 0) {
    EXPECT_LE(report.at("bound_ratio").get<double>(), 1.0 + 1e-9);
  }
  ASSERT_EQ(cli("audit --run-dir " + run + " --samples 1 --out " + dir_.file("a3")), 0);
  const double eps = json::parse(read_bytes(dir_.file("a3/audit.json"))).at("eps_hat").get<double>();
  EXPECT_TRUE(eps == 0.0 || eps == 1.0);
  EXPECT_EQ(cli("audit --run-dir " + dir_.file("image.pgm")), 2);
}

TEST_F(CliTest, SmallToyCompletesAndReplays) {
  const std::string out = dir_.file("toy");
  std::string log;
  ASSERT_EQ(cli("toy --depth 5 --width 20 --in 16 --out 2 --m 2000 --epsilon 0.005 --t 1000"
                " --t-surrogate 400 --tprime 1000 --validation 20000 --seed 3 --out-dir " + out,
                &log),
            0)
      << log;
  const json s = json::parse(read_bytes(out + "/summary.json"));
  EXPECT_LE(s.at("naive").at("outside_fraction").get<double>(), 0.02);
  ASSERT_EQ(cli("--threads 2 replay --manifest " + out + "/manifest.json --out " + dir_.file("toy2")),
            0);
  EXPECT_EQ(primary_outputs(out), primary_outputs(dir_.file("toy2")));
}

}  // namespace
}  // namespace confreach
