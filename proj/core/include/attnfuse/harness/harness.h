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

#ifndef ATTNFUSE_HARNESS_HARNESS_H_
#define ATTNFUSE_HARNESS_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attnfuse/attnet/model.h"
#include "attnfuse/attnet/train.h"
#include "attnfuse/metrics/evaluate.h"
#include "attnfuse/synthworld/profile.h"
#include "attnfuse/synthworld/scene.h"
#include "attnfuse/uncert/uncert.h"

namespace attnfuse::harness {

enum class SweepAxis : std::uint8_t { kPatch, kTasks, kUncertainty, kShift };

std::string_view SweepAxisName(SweepAxis axis);
// Throws UsageError.
SweepAxis ParseSweepAxis(std::string_view name);

struct ExperimentConfig {
  synthworld::SceneSpec scene;
  synthworld::CorruptionProfile profile;
  int train_count = 512;
  int test_count = 128;
  // Shifted copies of the test split written by Generate.
  std::vector<synthworld::ShiftKind> test_shifts{synthworld::ShiftKind::kFog};

  attnet::ModelConfig model;
  attnet::TrainOptions train;

  // Axis swept by the sweep command, and the values of every axis.
  SweepAxis sweep_axis = SweepAxis::kPatch;
  std::vector<int> sweep_patches{1, 8, 32};
  std::vector<std::vector<synthworld::Task>> sweep_tasks{
      {synthworld::Task::kSemantic},
      {synthworld::Task::kSemantic, synthworld::Task::kDepth},
      {synthworld::Task::kSemantic, synthworld::Task::kDepth, synthworld::Task::kNormal}};
  std::vector<uncert::Method> sweep_methods{uncert::Method::kSoftmaxEntropy, uncert::Method::kSoftmaxDistance,
                                            uncert::Method::kEnsemble};
  std::vector<synthworld::ShiftKind> sweep_shifts{synthworld::ShiftKind::kNone,
                                                  synthworld::ShiftKind::kFog,
                                                  synthworld::ShiftKind::kNight};

  // Map dumps written by Eval for the first `dump_samples` test samples.
  bool dump_maps = false;
  int dump_samples = 4;
  std::filesystem::path checkpoint;  // empty: <out_dir>/model.ckpt

  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "attnfuse-out";

  // Seeds derived from `seed`.
  std::uint64_t train_data_seed() const;
  std::uint64_t test_data_seed() const;
  std::uint64_t model_seed() const;
  std::uint64_t shuffle_seed() const;

  std::filesystem::path data_dir(std::string_view split) const;
  std::filesystem::path checkpoint_path() const;

  // Throws UsageError.
  void Validate() const;
};

// The profile defaults to DefaultProfile with instance predictions enabled.
// Sweep values used when the config leaves them out.
std::vector<std::vector<synthworld::Task>> DefaultSweepTasks(synthworld::Task target);
std::vector<uncert::Method> DefaultSweepMethods(synthworld::Task target);

ExperimentConfig DefaultExperimentConfig();

// Relative paths in the document resolve against the working directory.
// Throws UsageError on malformed or invalid input.
ExperimentConfig ParseExperimentConfig(std::string_view json_text);
// Throws IoError when the file cannot be read.
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
std::string ExperimentConfigJson(const ExperimentConfig& config);

// Split names: "train", "test" and "test-<shift>".
std::vector<std::string> SplitNames(const ExperimentConfig& config);

// Writes every split under <out_dir>/data. Splits whose manifest already
// matches the config are kept.
void Generate(const ExperimentConfig& config, std::ostream& log);

struct TrainOutcome {
  attnet::TrainResult result;
  std::filesystem::path checkpoint;
};

// Trains config.model on the train split (generated if missing) and writes
// the checkpoint and <out_dir>/loss.csv.
TrainOutcome TrainModel(const ExperimentConfig& config, std::ostream& log);

struct EvalRow {
  std::string split;
  metrics::Source source;
  metrics::MetricReport report;
};

// Fused and raw reports on the test split and each configured shifted test
// split, written to <out_dir>/eval.csv and <out_dir>/eval.json. Missing
// splits are generated.
std::vector<EvalRow> Evaluate(const ExperimentConfig& config, std::ostream& log);

struct SweepRow {
  std::string value;
  metrics::MetricReport fused;
  metrics::MetricReport raw;
};

// Trained models keyed by the model config together with everything else that
// determines training (data, seeds, options).
using ModelCache = std::map<std::string, attnet::AttentionModel>;

// One model per axis value on common data; writes <out_dir>/sweep_<axis>.csv.
// Every axis value is checked before any training starts. Runs whose model is
// already in `cache` reuse it.
std::vector<SweepRow> Sweep(const ExperimentConfig& config, SweepAxis axis, std::ostream& log,
                            ModelCache* cache = nullptr);

// "<axis>,zncc_fused,zncc_raw,ap_err,ap_suc,fpr95" rows. The pooled columns
// describe the fused estimate and are empty for regression targets.
std::string SweepCsv(SweepAxis axis, const std::vector<SweepRow>& rows);

// Min-max scaled 8-bit binary PGM of a [1, 1, H, W] map.
std::string EncodePgm(const numgrid::Tensor& map);

}  // namespace attnfuse::harness

#endif  // ATTNFUSE_HARNESS_HARNESS_H_
