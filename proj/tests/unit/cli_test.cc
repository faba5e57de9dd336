// Copyright 2026 The amilkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the amilkit binary through the shell.

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace amilkit {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with AMILKIT_WORKDIR cleared.
Outcome Cli(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt";
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = "env -u AMILKIT_WORKDIR " + std::string(AMILKIT_CLI_PATH) +
                          " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  Outcome o;
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  o.out = testing::ReadFile(out);
  o.err = testing::ReadFile(err);
  return o;
}

std::string ErrorField(const Outcome& o) {
  return nlohmann::json::parse(o.err).at("error").get<std::string>();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

constexpr const char* kSmallConfig = R"({
  // small synthetic run
  "synth": {"n_types": 2, "entities_per_type": 20, "n_relations": 3,
            "n_triples": 60},
  "encoder": {"hidden_dim": 8, "layers": 1, "heads": 2},
  "train": {"max_epochs": 2},
  "p_at": [10, 20],
  "seed": 3
})";

TEST(CliTest, UnknownArchIsUsageError) {
  const fs::path dir = testing::TempDir("cli_arch");
  const Outcome o = Cli("--workdir " + dir.string() + " --arch Z train", dir);
  EXPECT_EQ(o.status, 2);
  EXPECT_EQ(ErrorField(o), "usage_error");
}

TEST(CliTest, MissingSubcommandAndUnknownFlag) {
  const fs::path dir = testing::TempDir("cli_usage");
  EXPECT_EQ(Cli("--workdir " + dir.string(), dir).status, 2);
  EXPECT_EQ(Cli("--workdir " + dir.string() + " --frobnicate synth", dir).status, 2);
  EXPECT_EQ(Cli("--workdir " + dir.string() + " --mode triple bag", dir).status, 2);
}

TEST(CliTest, WorkdirRequired) {
  const fs::path dir = testing::TempDir("cli_noworkdir");
  const Outcome o = Cli("synth", dir);
  EXPECT_EQ(o.status, 2);
  EXPECT_EQ(ErrorField(o), "usage_error");
}

TEST(CliTest, WorkdirFromEnvironment) {
  const fs::path dir = testing::TempDir("cli_env");
  const fs::path work = dir / "work";
  WriteText(dir / "c.json", kSmallConfig);
  const std::string cmd = "AMILKIT_WORKDIR=" + work.string() + " " +
                          AMILKIT_CLI_PATH + " --config " +
                          (dir / "c.json").string() + " -q synth >/dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(work / "kg.tsv"));
}

TEST(CliTest, MissingInputIsFailure) {
  const fs::path dir = testing::TempDir("cli_missing");
  const Outcome o = Cli("--workdir " + dir.string() + " preprocess", dir);
  EXPECT_EQ(o.status, 1);
  EXPECT_EQ(ErrorField(o), "io_error");
  EXPECT_FALSE(nlohmann::json::parse(o.err).at("message").get<std::string>().empty());
}

TEST(CliTest, BadConfigIsFailure) {
  const fs::path dir = testing::TempDir("cli_badconfig");
  WriteText(dir / "bad.json", R"({"encoder": {"hidden_dim": "wide"}})");
  const Outcome o =
      Cli("--workdir " + dir.string() + " --config " + (dir / "bad.json").string() +
              " synth",
          dir);
  EXPECT_EQ(o.status, 1);
  EXPECT_EQ(ErrorField(o), "invalid_config");
}

TEST(CliTest, PipelineSidecarsAndPrecedence) {
  const fs::path dir = testing::TempDir("cli_pipeline");
  const fs::path work = dir / "work";
  WriteText(dir / "c.jsonc", kSmallConfig);
  const std::string base =
      "--config " + (dir / "c.jsonc").string() + " --workdir " + work.string() +
      " --workers 1 -q ";
  for (const char* cmd : {"synth", "preprocess"}) {
    const Outcome o = Cli(base + cmd, dir);
    ASSERT_EQ(o.status, 0) << cmd << ": " << o.err;
    EXPECT_NO_THROW(nlohmann::json::parse(o.out));
  }
  ASSERT_EQ(Cli(base + "--mode pair bag", dir).status, 0);
  const std::string pair_bags = testing::ReadFile(work / "bags_pair.jsonl");
  ASSERT_EQ(Cli(base + "--mode pair bag", dir).status, 0);
  EXPECT_EQ(testing::ReadFile(work / "bags_pair.jsonl"), pair_bags);

  const Outcome train = Cli(base + "--mode type --arch M --seed 4 train", dir);
  ASSERT_EQ(train.status, 0) << train.err;
  EXPECT_TRUE(fs::exists(work / "model_type_M.ckpt"));
  const auto meta = nlohmann::json::parse(testing::ReadFile(work / "meta" / "train.json"));
  EXPECT_EQ(meta.at("config").at("seed"), 4);           // flag beats config
  EXPECT_EQ(meta.at("config").at("encoder").at("hidden_dim"), 8);  // config
  EXPECT_EQ(meta.at("config").at("bag_size"), 16);       // default
  EXPECT_EQ(meta.at("command"), "train");
  EXPECT_TRUE(meta.contains("started_at"));
  EXPECT_TRUE(meta.contains("elapsed_seconds"));

  const Outcome eval = Cli(base + "--mode type --arch M --seed 4 --p-at 5,15 eval", dir);
  ASSERT_EQ(eval.status, 0) << eval.err;
  const auto metrics =
      nlohmann::json::parse(testing::ReadFile(work / "metrics_type_M.json"));
  EXPECT_TRUE(metrics.at("corpus").at("precision_at").contains("15"));
  ASSERT_EQ(Cli(base + "report", dir).status, 0);
  EXPECT_TRUE(fs::exists(work / "report.csv"));
}

TEST(CliTest, Help) {
  const fs::path dir = testing::TempDir("cli_help");
  const Outcome o = Cli("--help", dir);
  EXPECT_EQ(o.status, 0);
  EXPECT_NE(o.out.find("ablate"), std::string::npos);
}

}  // namespace
}  // namespace amilkit
