// Copyright 2026 The attnfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "gtest/gtest.h"
#include "attnfuse/harness/harness.h"
#include "attnfuse/numgrid/io.h"

namespace attnfuse {
namespace {

namespace fs = std::filesystem;

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("attnfuse_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int RunCli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + " " + std::string(ATTNFUSE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path TinyConfig(const fs::path& dir) {
  harness::ExperimentConfig c = harness::DefaultExperimentConfig();
  c.scene.resolution = 16;
  c.model.map_resolution = 16;
  c.model.image_channels = 4;
  c.model.pred_channels = 2;
  c.model.hidden_channels = 4;
  c.train_count = 3;
  c.test_count = 2;
  c.test_shifts = {};
  c.train.epochs = 1;
  c.sweep_patches = {1, 2};
  c.out_dir = dir / "out";
  const fs::path path = dir / "config.json";
  numgrid::WriteFileAtomic(path, harness::ExperimentConfigJson(c));
  return path;
}

TEST(CliTest, UsageErrorsExitTwo) {
  const fs::path dir = Scratch("usage");
  EXPECT_EQ(RunCli(""), 2);
  EXPECT_EQ(RunCli("frobnicate --config x"), 2);
  EXPECT_EQ(RunCli("train"), 2);
  EXPECT_EQ(RunCli("train --config " + TinyConfig(dir).string() + " --seed notanumber"), 2);
  numgrid::WriteFileAtomic(dir / "bad.json", R"({"model": {"patch": 3}})");
  EXPECT_EQ(RunCli("generate --config " + (dir / "bad.json").string()), 2);
  numgrid::WriteFileAtomic(dir / "garbled.json", "{ not json");
  EXPECT_EQ(RunCli("generate --config " + (dir / "garbled.json").string()), 2);
}

TEST(CliTest, IoErrorsExitThree) {
  const fs::path dir = Scratch("io");
  EXPECT_EQ(RunCli("generate --config " + (dir / "missing.json").string()), 3);
  const fs::path config = TinyConfig(dir);
  // Evaluation before training has no checkpoint to read.
  EXPECT_EQ(RunCli("eval --config " + config.string()), 3);
  numgrid::WriteFileAtomic(dir / "blocker", "x");
  EXPECT_EQ(RunCli("generate --config " + config.string() + " --out " + (dir / "blocker" / "o").string()),
            3);
}

TEST(CliTest, FullRunWithOverrides) {
  const fs::path dir = Scratch("full");
  const fs::path config = TinyConfig(dir);
  const fs::path out = dir / "override";
  const std::string common = " --config " + config.string() + " --seed 7 --out " + out.string();
  EXPECT_EQ(RunCli("generate" + common, "ATTNFUSE_THREADS=1"), 0);
  EXPECT_TRUE(fs::exists(out / "data" / "train" / "manifest.json"));
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_EQ(RunCli("train" + common), 0);
  EXPECT_TRUE(fs::exists(out / "model.ckpt"));
  EXPECT_EQ(RunCli("eval" + common), 0);
  EXPECT_TRUE(fs::exists(out / "eval.csv"));
  EXPECT_EQ(RunCli("sweep" + common), 0);
  EXPECT_TRUE(fs::exists(out / "sweep_patch.csv"));

  // A different seed writes different data.
  const fs::path other = dir / "other";
  EXPECT_EQ(RunCli("generate --config " + config.string() + " --seed 8 --out " + other.string()), 0);
  const fs::path sample = fs::path("data") / "train" / "samples" / "0" / "image.ngt";
  ASSERT_TRUE(fs::exists(out / sample));
  EXPECT_NE(numgrid::ReadFileBytes(out / sample), numgrid::ReadFileBytes(other / sample));
}

}  // namespace
}  // namespace attnfuse
