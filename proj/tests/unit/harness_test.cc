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

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "attnfuse/errors.h"
#include "attnfuse/harness/harness.h"
#include "attnfuse/numgrid/io.h"

namespace attnfuse::harness {
namespace {

namespace fs = std::filesystem;
using synthworld::Task;

ExperimentConfig TinyConfig(const std::string& name) {
  ExperimentConfig c = DefaultExperimentConfig();
  c.scene.resolution = 16;
  c.model.map_resolution = 16;
  c.model.image_channels = 4;
  c.model.pred_channels = 2;
  c.model.hidden_channels = 4;
  c.train_count = 4;
  c.test_count = 3;
  c.test_shifts = {synthworld::ShiftKind::kFog};
  c.train.epochs = 2;
  c.train.batch_size = 2;
  c.sweep_patches = {1, 2, 4};
  c.sweep_shifts = {synthworld::ShiftKind::kNone, synthworld::ShiftKind::kFog};
  c.out_dir = fs::path(::testing::TempDir()) / ("attnfuse_harness_" + name);
  fs::remove_all(c.out_dir);
  return c;
}

std::vector<std::vector<std::string>> ReadCsv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(numgrid::ReadFileBytes(path));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    for (std::string cell; std::getline(cs, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

TEST(ConfigTest, DefaultRoundTripsThroughJson) {
  const ExperimentConfig c = DefaultExperimentConfig();
  const std::string text = ExperimentConfigJson(c);
  EXPECT_EQ(ExperimentConfigJson(ParseExperimentConfig(text)), text);
  EXPECT_EQ(ExperimentConfigJson(ParseExperimentConfig("{}")), text);
}

TEST(ConfigTest, DefaultUncertaintySweepFollowsTarget) {
  const ExperimentConfig c = ParseExperimentConfig(
      R"({"model": {"tasks": ["depth", "semantic"], "target": "depth"}})");
  EXPECT_EQ(c.sweep_methods, uncert::MethodsFor(Task::kDepth));
  EXPECT_EQ(c.sweep_tasks.front(), (std::vector<Task>{Task::kDepth}));
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(DefaultExperimentConfig().sweep_methods,
            (std::vector<uncert::Method>{uncert::Method::kSoftmaxEntropy,
                                         uncert::Method::kSoftmaxDistance,
                                         uncert::Method::kEnsemble}));
}

TEST(ConfigTest, InvalidConfigsAreUsageErrors) {
  for (const char* text : {
           "not json",
           "[]",
           R"({"bogus": 1})",
           R"({"seed": "one"})",
           R"({"data": {"train_count": -1}})",
           R"({"data": {"extra": 1}})",
           R"({"model": {"patch": 3}})",
           R"({"model": {"tasks": ["semantic", "colour"]}})",
           R"({"train": {"epochs": -2}})",
           R"({"sweep": {"axis": "width"}})",
           R"({"sweep": {"patch": [1, 5]}})",
           R"({"sweep": {"uncertainty": ["roi"]}})",
           R"({"sweep": {"tasks": [["depth"]]}})",
           R"({"scene": {"num_classes": 1}})",
       }) {
    EXPECT_THROW(ParseExperimentConfig(text).Validate(), UsageError) << text;
  }
}

TEST(ConfigTest, MissingFileIsIoError) {
  EXPECT_THROW(LoadExperimentConfig(fs::path(::testing::TempDir()) / "no_such_config.json"),
               IoError);
}

TEST(ConfigTest, SplitNamesFollowShifts) {
  ExperimentConfig c = DefaultExperimentConfig();
  EXPECT_EQ(SplitNames(c), (std::vector<std::string>{"train", "test", "test-fog"}));
  c.test_shifts.clear();
  EXPECT_EQ(SplitNames(c), (std::vector<std::string>{"train", "test"}));
  EXPECT_NE(c.train_data_seed(), c.test_data_seed());
  EXPECT_NE(c.model_seed(), c.shuffle_seed());
}

TEST(PgmTest, StableMinMaxEncoding) {
  numgrid::Tensor m(numgrid::Dims{1, 1, 2, 3}, std::vector<float>{0, 1, 2, 3, 4, 10});
  const std::string a = EncodePgm(m);
  EXPECT_EQ(a, EncodePgm(m));
  const std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(a.size(), header.size() + 6);
  EXPECT_EQ(a.substr(0, header.size()), header);
  EXPECT_EQ(static_cast<unsigned char>(a[header.size()]), 0);
  EXPECT_EQ(static_cast<unsigned char>(a.back()), 255);
  const std::string flat = EncodePgm(numgrid::Tensor(numgrid::Dims{1, 1, 2, 2}, 0.5f));
  for (std::size_t i = flat.size() - 4; i < flat.size(); ++i) EXPECT_EQ(flat[i], 0);
}

TEST(PipelineTest, GenerateTrainEvaluate) {
  ExperimentConfig c = TinyConfig("pipeline");
  c.dump_maps = true;
  c.dump_samples = 2;
  std::ostringstream log;
  Generate(c, log);
  for (const std::string& split : SplitNames(c)) {
    EXPECT_TRUE(fs::exists(c.data_dir(split) / synthworld::kManifestName)) << split;
  }
  const TrainOutcome t = TrainModel(c, log);
  EXPECT_EQ(t.checkpoint, c.checkpoint_path());
  EXPECT_EQ(t.result.epoch_loss.size(), 2u);
  EXPECT_TRUE(fs::exists(c.out_dir / "loss.csv"));

  const std::vector<EvalRow> rows = Evaluate(c, log);
  ASSERT_EQ(rows.size(), 4u);  // fused and raw on test and test-fog

  // CSV and JSON carry the same numbers.
  const auto csv = ReadCsv(c.out_dir / "eval.csv");
  ASSERT_EQ(csv.size(), 5u);
  EXPECT_EQ(csv[0], (std::vector<std::string>{"split", "source", "samples", "zncc", "ap_err",
                                              "ap_suc", "fpr95"}));
  const nlohmann::json js = nlohmann::json::parse(numgrid::ReadFileBytes(c.out_dir / "eval.json"));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto& cells = csv[i + 1];
    EXPECT_EQ(cells[0], r.split);
    EXPECT_EQ(cells[1], metrics::SourceName(r.source));
    EXPECT_EQ(std::stoi(cells[2]), c.test_count);
    EXPECT_NEAR(std::stod(cells[3]), r.report.mean_zncc, 1e-9);
    EXPECT_NEAR(std::stod(cells[4]), r.report.ap_error, 1e-9);
    EXPECT_NEAR(std::stod(cells[6]), r.report.fpr95, 1e-9);
    bool found = false;
    for (const auto& entry : js.at("reports")) {
      if (entry.at("split") == r.split && entry.at("source") == metrics::SourceName(r.source)) {
        found = true;
        const auto& report = entry.at("report");
        EXPECT_NEAR(report.at("mean_zncc").get<double>(), std::stod(cells[3]), 1e-9);
        EXPECT_NEAR(report.at("ap_success").get<double>(), std::stod(cells[5]), 1e-9);
        EXPECT_EQ(report.at("per_sample").size(), static_cast<std::size_t>(c.test_count));
      }
    }
    EXPECT_TRUE(found) << r.split;
  }

  const fs::path maps = c.out_dir / "maps" / "0";
  for (const char* name : {"fused", "error", "weight_semantic", "unc_semantic"}) {
    EXPECT_TRUE(fs::exists(maps / (std::string(name) + ".ngt"))) << name;
    EXPECT_TRUE(fs::exists(maps / (std::string(name) + ".pgm"))) << name;
  }
  EXPECT_FALSE(fs::exists(c.out_dir / "maps" / "2"));

  // Re-evaluation rewrites identical bytes.
  const std::string first = numgrid::ReadFileBytes(c.out_dir / "eval.csv");
  const std::string pgm = numgrid::ReadFileBytes(maps / "fused.pgm");
  Evaluate(c, log);
  EXPECT_EQ(numgrid::ReadFileBytes(c.out_dir / "eval.csv"), first);
  EXPECT_EQ(numgrid::ReadFileBytes(maps / "fused.pgm"), pgm);
}

TEST(PipelineTest, EvaluateWithoutCheckpointIsIoError) {
  ExperimentConfig c = TinyConfig("nockpt");
  std::ostringstream log;
  Generate(c, log);
  EXPECT_THROW(Evaluate(c, log), IoError);
}

TEST(SweepTest, PatchSweepWritesOneRowPerValue) {
  const ExperimentConfig c = TinyConfig("sweep");
  std::ostringstream log;
  const std::vector<SweepRow> rows = Sweep(c, SweepAxis::kPatch, log);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].value, "1");
  EXPECT_EQ(rows[2].value, "4");
  for (const SweepRow& r : rows) {
    EXPECT_EQ(r.fused.samples(), c.test_count);
    EXPECT_EQ(r.raw.mean_zncc, rows[0].raw.mean_zncc);
    EXPECT_TRUE(fs::exists(c.out_dir / "sweep_patch" / r.value / "model.ckpt"));
  }
  const auto csv = ReadCsv(c.out_dir / "sweep_patch.csv");
  ASSERT_EQ(csv.size(), 4u);
  EXPECT_EQ(csv[0], (std::vector<std::string>{"patch", "zncc_fused", "zncc_raw", "ap_err",
                                              "ap_suc", "fpr95"}));
  EXPECT_EQ(numgrid::ReadFileBytes(c.out_dir / "sweep_patch.csv"), SweepCsv(SweepAxis::kPatch, rows));
}

TEST(SweepTest, ShiftSweepEvaluatesShiftedSplits) {
  const ExperimentConfig c = TinyConfig("shift");
  std::ostringstream log;
  ModelCache cache;
  const std::vector<SweepRow> rows = Sweep(c, SweepAxis::kShift, log, &cache);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].value, "none");
  EXPECT_EQ(rows[1].value, "fog");
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_NE(rows[0].raw.mean_zncc, rows[1].raw.mean_zncc);
}

TEST(SweepTest, InvalidValueFailsBeforeTraining) {
  ExperimentConfig c = TinyConfig("invalid");
  c.sweep_patches = {1, 3};
  std::ostringstream log;
  EXPECT_THROW(Sweep(c, SweepAxis::kPatch, log), UsageError);
  EXPECT_FALSE(fs::exists(c.out_dir));
  c = TinyConfig("duplicate");
  c.sweep_patches = {2, 2};
  EXPECT_THROW(Sweep(c, SweepAxis::kPatch, log), UsageError);
  EXPECT_FALSE(fs::exists(c.out_dir));
}

}  // namespace
}  // namespace attnfuse::harness
