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

#include "attnfuse/harness/harness.h"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "attnfuse/errors.h"
#include "attnfuse/numgrid/io.h"
#include "attnfuse/synthworld/dataset.h"
#include "src/common/json_convert.h"

namespace attnfuse::harness {
namespace {

namespace fs = std::filesystem;
using internal::Json;
using synthworld::Manifest;
using synthworld::ShiftKind;
using synthworld::Task;

constexpr std::uint64_t kTrainDataStream = 0x7a1;
constexpr std::uint64_t kTestDataStream = 0x7e57;
constexpr std::uint64_t kModelStream = 0x30de1;
constexpr std::uint64_t kShuffleStream = 0x5f1e;

void CheckKeys(const Json& j, std::initializer_list<std::string_view> allowed,
               std::string_view where) {
  if (!j.is_object()) throw UsageError("config: " + std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw UsageError("config: unknown field '" + key + "' in " + std::string(where));
    }
  }
}

std::string TaskSetName(const std::vector<Task>& tasks) {
  std::string out;
  for (Task t : tasks) {
    if (!out.empty()) out += "+";
    out += synthworld::TaskName(t);
  }
  return out;
}

std::string ShiftSplit(ShiftKind kind) {
  return kind == ShiftKind::kNone ? "test" : "test-" + std::string(synthworld::ShiftName(kind));
}

// Spec, profile, seed and count a split must be generated from.
struct SplitPlan {
  std::string name;
  synthworld::CorruptionProfile profile;
  std::uint64_t base_seed;
  int count;
};

SplitPlan PlanSplit(const ExperimentConfig& config, const std::string& name) {
  if (name == "train") {
    return {name, config.profile, config.train_data_seed(), config.train_count};
  }
  if (name == "test") return {name, config.profile, config.test_data_seed(), config.test_count};
  if (name.starts_with("test-")) {
    const ShiftKind kind = synthworld::ParseShift(name.substr(5));
    return {name, synthworld::ShiftProfile(config.profile, kind), config.test_data_seed(),
            config.test_count};
  }
  throw UsageError("unknown split " + name);
}

Manifest EnsureSplit(const ExperimentConfig& config, const std::string& name, std::ostream& log) {
  const SplitPlan plan = PlanSplit(config, name);
  const fs::path dir = config.data_dir(name);
  if (fs::exists(dir / synthworld::kManifestName)) {
    try {
      Manifest m = synthworld::LoadManifest(dir);
      if (m.spec == config.scene && m.profile == plan.profile && m.base_seed == plan.base_seed &&
          static_cast<int>(m.samples.size()) == plan.count) {
        return m;
      }
    } catch (const FormatError&) {
      // Regenerated below.
    }
    log << "regenerating stale split " << name << "\n";
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (ec) throw IoError("cannot clear dataset directory", dir);
  log << "generating " << name << " (" << plan.count << " samples)\n";
  synthworld::BuildOptions options;
  options.derived = uncert::StandardDerivedMaps();
  return synthworld::BuildDataset(config.scene, plan.profile, plan.count, dir, plan.base_seed,
                                  options);
}

attnet::AttentionModel TrainOn(const ExperimentConfig& config, const attnet::ModelConfig& model_config,
                               const fs::path& checkpoint, const fs::path& loss_csv,
                               std::ostream& log, attnet::TrainResult* result_out) {
  const Manifest manifest = EnsureSplit(config, "train", log);
  const std::vector<attnet::Example> examples =
      attnet::LoadExamples(config.data_dir("train"), manifest, model_config);
  attnet::AttentionModel model(model_config, config.model_seed());
  attnet::TrainOptions options = config.train;
  options.seed = config.shuffle_seed();
  const attnet::TrainResult result =
      attnet::Train(model, examples, options, [&log](int epoch, double loss) {
        log << "epoch " << epoch << " loss " << metrics::FormatMetric(loss) << "\n";
      });
  fs::create_directories(checkpoint.parent_path());
  attnet::SaveModel(model, checkpoint);
  numgrid::WriteFileAtomic(loss_csv, attnet::LossCurveCsv(result));
  if (result_out != nullptr) *result_out = result;
  return model;
}

Json ParseReportJson(const metrics::MetricReport& report) {
  return Json::parse(metrics::ReportJson(report));
}

void DumpMap(const fs::path& dir, const std::string& name, const numgrid::Tensor& map) {
  numgrid::WriteNgt(dir / (name + ".ngt"), map);
  numgrid::WriteFileAtomic(dir / (name + ".pgm"), EncodePgm(map));
}

void DumpMaps(const fs::path& dir, attnet::AttentionModel& model,
              const std::vector<attnet::Example>& examples, int count) {
  const attnet::ModelConfig& cfg = model.config();
  const int r = cfg.map_resolution;
  for (int i = 0; i < std::min<int>(count, static_cast<int>(examples.size())); ++i) {
    const attnet::Example& ex = examples[i];
    const fs::path sample_dir = dir / std::to_string(i);
    fs::create_directories(sample_dir);
    const numgrid::Tensor weights = attnet::PredictWeights(model, ex);
    DumpMap(sample_dir, "fused", attnet::FusedEstimate(weights, ex.uncertainties));
    DumpMap(sample_dir, "error", ex.error);
    for (int t = 0; t < cfg.n_tasks(); ++t) {
      numgrid::Tensor w(numgrid::Dims{1, 1, r, r});
      std::copy_n(weights.data() + static_cast<std::size_t>(t) * r * r, w.size(), w.data());
      const std::string task(synthworld::TaskName(cfg.tasks[t]));
      DumpMap(sample_dir, "weight_" + task, w);
      DumpMap(sample_dir, "unc_" + task, ex.uncertainties[t]);
    }
  }
}

std::string TrainingKey(const ExperimentConfig& config, const attnet::ModelConfig& model) {
  const Json key{{"model", internal::ToJson(model)},
                 {"scene", internal::ToJson(config.scene)},
                 {"profile", internal::ToJson(config.profile)},
                 {"train_count", config.train_count},
                 {"seed", config.seed},
                 {"learning_rate", config.train.learning_rate},
                 {"epochs", config.train.epochs},
                 {"batch_size", config.train.batch_size},
                 {"out_dir", config.out_dir.string()}};
  return key.dump();
}

}  // namespace

std::string_view SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kPatch:
      return "patch";
    case SweepAxis::kTasks:
      return "tasks";
    case SweepAxis::kUncertainty:
      return "uncertainty";
    case SweepAxis::kShift:
      return "shift";
  }
  return "?";
}

SweepAxis ParseSweepAxis(std::string_view name) {
  for (SweepAxis a :
       {SweepAxis::kPatch, SweepAxis::kTasks, SweepAxis::kUncertainty, SweepAxis::kShift}) {
    if (SweepAxisName(a) == name) return a;
  }
  throw UsageError("unknown sweep axis '" + std::string(name) + "'");
}

std::uint64_t ExperimentConfig::train_data_seed() const {
  return synthworld::MixSeed(seed, kTrainDataStream);
}
std::uint64_t ExperimentConfig::test_data_seed() const {
  return synthworld::MixSeed(seed, kTestDataStream);
}
std::uint64_t ExperimentConfig::model_seed() const {
  return synthworld::MixSeed(seed, kModelStream);
}
std::uint64_t ExperimentConfig::shuffle_seed() const {
  return synthworld::MixSeed(seed, kShuffleStream);
}

fs::path ExperimentConfig::data_dir(std::string_view split) const {
  return out_dir / "data" / std::string(split);
}

fs::path ExperimentConfig::checkpoint_path() const {
  return checkpoint.empty() ? out_dir / "model.ckpt" : checkpoint;
}

void ExperimentConfig::Validate() const {
  scene.Validate();
  profile.Validate(scene.num_classes);
  if (profile.shift != ShiftKind::kNone) {
    throw UsageError("config: the base profile must be unshifted; list shifts in data.test_shifts");
  }
  model.Validate();
  if (model.num_classes != scene.num_classes) {
    throw UsageError("config: model.num_classes must equal scene.num_classes");
  }
  if (model.map_resolution != scene.resolution) {
    throw UsageError("config: model.map_resolution must equal scene.resolution");
  }
  const auto needs_instance = [this](const std::vector<Task>& tasks) {
    return std::find(tasks.begin(), tasks.end(), Task::kInstance) != tasks.end() &&
           !profile.instance_enabled;
  };
  if (needs_instance(model.tasks)) {
    throw UsageError("config: the instance task needs profile.instance_enabled");
  }
  if (train_count < 1 || test_count < 1) throw UsageError("config: split sizes must be >= 1");
  if (train.epochs < 0 || train.batch_size < 1 || !(train.learning_rate > 0)) {
    throw UsageError("config: epochs >= 0, batch_size >= 1 and learning_rate > 0 required");
  }
  if (dump_samples < 0) throw UsageError("config: dump_samples must be >= 0");
  for (ShiftKind s : test_shifts) {
    if (s == ShiftKind::kNone) throw UsageError("config: test_shifts cannot contain none");
  }
  for (int p : sweep_patches) {
    attnet::ModelConfig m = model;
    m.patch = p;
    m.Validate();
  }
  for (const auto& tasks : sweep_tasks) {
    if (std::find(tasks.begin(), tasks.end(), model.target) == tasks.end()) {
      throw UsageError("config: every sweep task set must include the target task");
    }
    if (needs_instance(tasks)) {
      throw UsageError("config: the instance task needs profile.instance_enabled");
    }
  }
  const auto ok = uncert::MethodsFor(model.target);
  for (uncert::Method m : sweep_methods) {
    if (std::find(ok.begin(), ok.end(), m) == ok.end()) {
      throw UsageError("config: method " + std::string(uncert::MethodName(m)) +
                       " does not apply to the target task");
    }
  }
}

// The target alone, then with the other main task, then with normals.
std::vector<std::vector<Task>> DefaultSweepTasks(Task target) {
  const Task other = target == Task::kSemantic ? Task::kDepth : Task::kSemantic;
  std::vector<std::vector<Task>> sets{{target}, {target, other}};
  if (target != Task::kNormal) sets.push_back({target, other, Task::kNormal});
  return sets;
}

std::vector<uncert::Method> DefaultSweepMethods(Task target) {
  if (target == Task::kSemantic) {
    return {uncert::Method::kSoftmaxEntropy, uncert::Method::kSoftmaxDistance,
            uncert::Method::kEnsemble};
  }
  return uncert::MethodsFor(target);
}

ExperimentConfig DefaultExperimentConfig() {
  ExperimentConfig c;
  c.profile = synthworld::DefaultProfile(c.scene.num_classes);
  c.profile.instance_enabled = true;
  c.model.num_classes = c.scene.num_classes;
  c.model.map_resolution = c.scene.resolution;
  c.sweep_methods = DefaultSweepMethods(c.model.target);
  c.sweep_tasks = DefaultSweepTasks(c.model.target);
  return c;
}

ExperimentConfig ParseExperimentConfig(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("config: invalid JSON: ") + e.what());
  }
  CheckKeys(j, {"scene", "profile", "data", "model", "train", "sweep", "eval", "seed", "out_dir"},
            "the config");
  ExperimentConfig c = DefaultExperimentConfig();
  if (j.contains("scene")) c.scene = internal::SceneSpecFromJson(j["scene"]);
  const int k = c.scene.num_classes;

  c.profile = synthworld::DefaultProfile(k);
  c.profile.instance_enabled = true;
  if (j.contains("profile")) {
    const Json& jp = j["profile"];
    synthworld::CorruptionProfile p = internal::ProfileFromJson(jp);
    if (!jp.contains("rules")) p.rules = c.profile.rules;
    if (!jp.contains("instance_enabled")) p.instance_enabled = true;
    c.profile = std::move(p);
  }

  if (j.contains("data")) {
    const Json& jd = j["data"];
    CheckKeys(jd, {"train_count", "test_count", "test_shifts"}, "data");
    internal::ReadOptional(jd, "train_count", c.train_count);
    internal::ReadOptional(jd, "test_count", c.test_count);
    if (jd.contains("test_shifts")) {
      c.test_shifts.clear();
      for (const auto& name : internal::ReadRequired<std::vector<std::string>>(jd, "test_shifts")) {
        c.test_shifts.push_back(synthworld::ParseShift(name));
      }
    }
  }

  Json jm = j.contains("model") ? j["model"] : Json::object();
  if (!jm.is_object()) throw UsageError("config: model must be an object");
  if (!jm.contains("num_classes")) jm["num_classes"] = k;
  if (!jm.contains("map_resolution")) jm["map_resolution"] = c.scene.resolution;
  c.model = internal::ModelConfigFromJson(jm);
  c.sweep_methods = DefaultSweepMethods(c.model.target);
  c.sweep_tasks = DefaultSweepTasks(c.model.target);

  if (j.contains("train")) {
    const Json& jt = j["train"];
    CheckKeys(jt, {"learning_rate", "epochs", "batch_size"}, "train");
    internal::ReadOptional(jt, "learning_rate", c.train.learning_rate);
    internal::ReadOptional(jt, "epochs", c.train.epochs);
    internal::ReadOptional(jt, "batch_size", c.train.batch_size);
  }

  if (j.contains("sweep")) {
    const Json& js = j["sweep"];
    CheckKeys(js, {"axis", "patch", "tasks", "uncertainty", "shift"}, "sweep");
    std::string axis(SweepAxisName(c.sweep_axis));
    internal::ReadOptional(js, "axis", axis);
    c.sweep_axis = ParseSweepAxis(axis);
    internal::ReadOptional(js, "patch", c.sweep_patches);
    if (js.contains("tasks")) {
      c.sweep_tasks.clear();
      for (const auto& set : internal::ReadRequired<std::vector<std::vector<std::string>>>(
               js, "tasks")) {
        std::vector<Task> tasks;
        for (const std::string& name : set) tasks.push_back(synthworld::ParseTask(name));
        c.sweep_tasks.push_back(std::move(tasks));
      }
    }
    if (js.contains("uncertainty")) {
      c.sweep_methods.clear();
      for (const auto& name : internal::ReadRequired<std::vector<std::string>>(js, "uncertainty")) {
        c.sweep_methods.push_back(uncert::ParseMethod(name));
      }
    }
    if (js.contains("shift")) {
      c.sweep_shifts.clear();
      for (const auto& name : internal::ReadRequired<std::vector<std::string>>(js, "shift")) {
        c.sweep_shifts.push_back(synthworld::ParseShift(name));
      }
    }
  }

  if (j.contains("eval")) {
    const Json& je = j["eval"];
    CheckKeys(je, {"dump_maps", "dump_samples", "checkpoint"}, "eval");
    internal::ReadOptional(je, "dump_maps", c.dump_maps);
    internal::ReadOptional(je, "dump_samples", c.dump_samples);
    std::string checkpoint;
    internal::ReadOptional(je, "checkpoint", checkpoint);
    c.checkpoint = checkpoint;
  }
  internal::ReadOptional(j, "seed", c.seed);
  std::string out_dir = c.out_dir.string();
  internal::ReadOptional(j, "out_dir", out_dir);
  c.out_dir = out_dir;
  c.Validate();
  return c;
}

ExperimentConfig LoadExperimentConfig(const fs::path& path) {
  return ParseExperimentConfig(numgrid::ReadFileBytes(path));
}

std::string ExperimentConfigJson(const ExperimentConfig& c) {
  Json shifts = Json::array();
  for (ShiftKind s : c.test_shifts) shifts.push_back(synthworld::ShiftName(s));
  Json task_sets = Json::array();
  for (const auto& set : c.sweep_tasks) {
    Json names = Json::array();
    for (Task t : set) names.push_back(synthworld::TaskName(t));
    task_sets.push_back(names);
  }
  Json methods = Json::array();
  for (uncert::Method m : c.sweep_methods) methods.push_back(uncert::MethodName(m));
  Json sweep_shifts = Json::array();
  for (ShiftKind s : c.sweep_shifts) sweep_shifts.push_back(synthworld::ShiftName(s));
  const Json j{
      {"scene", internal::ToJson(c.scene)},
      {"profile", internal::ToJson(c.profile)},
      {"data",
       {{"train_count", c.train_count}, {"test_count", c.test_count}, {"test_shifts", shifts}}},
      {"model", internal::ToJson(c.model)},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size}}},
      {"sweep",
       {{"axis", SweepAxisName(c.sweep_axis)},
        {"patch", c.sweep_patches},
        {"tasks", task_sets},
        {"uncertainty", methods},
        {"shift", sweep_shifts}}},
      {"eval",
       {{"dump_maps", c.dump_maps},
        {"dump_samples", c.dump_samples},
        {"checkpoint", c.checkpoint.string()}}},
      {"seed", c.seed},
      {"out_dir", c.out_dir.string()}};
  return internal::Dump(j);
}

std::vector<std::string> SplitNames(const ExperimentConfig& config) {
  std::vector<std::string> names{"train", "test"};
  for (ShiftKind s : config.test_shifts) names.push_back(ShiftSplit(s));
  return names;
}

void Generate(const ExperimentConfig& config, std::ostream& log) {
  config.Validate();
  for (const std::string& name : SplitNames(config)) EnsureSplit(config, name, log);
}

TrainOutcome TrainModel(const ExperimentConfig& config, std::ostream& log) {
  config.Validate();
  TrainOutcome out;
  out.checkpoint = config.checkpoint_path();
  TrainOn(config, config.model, out.checkpoint, config.out_dir / "loss.csv", log, &out.result);
  return out;
}

std::vector<EvalRow> Evaluate(const ExperimentConfig& config, std::ostream& log) {
  config.Validate();
  attnet::AttentionModel model = attnet::LoadModel(config.checkpoint_path());
  const attnet::ModelConfig& cfg = model.config();
  std::vector<EvalRow> rows;
  std::vector<std::string> splits{"test"};
  for (ShiftKind s : config.test_shifts) splits.push_back(ShiftSplit(s));
  for (const std::string& split : splits) {
    const Manifest manifest = EnsureSplit(config, split, log);
    const std::vector<attnet::Example> examples =
        attnet::LoadExamples(config.data_dir(split), manifest, cfg);
    for (metrics::Source source : {metrics::Source::kFused, metrics::Source::kRaw}) {
      rows.push_back({split, source, metrics::EvaluateLoaded(examples, cfg, &model, source)});
      log << split << " " << metrics::SourceName(source) << " zncc "
          << metrics::FormatMetric(rows.back().report.mean_zncc) << "\n";
    }
    if (config.dump_maps && split == "test") {
      DumpMaps(config.out_dir / "maps", model, examples, config.dump_samples);
    }
  }

  const std::vector<std::string> keys{"split", "source"};
  std::string csv = metrics::ReportCsvHeader(keys);
  Json reports = Json::array();
  for (const EvalRow& row : rows) {
    const std::vector<std::string> values{row.split, std::string(metrics::SourceName(row.source))};
    csv += metrics::ReportCsvRow(values, row.report);
    reports.push_back(
        {{"split", row.split}, {"source", values[1]}, {"report", ParseReportJson(row.report)}});
  }
  fs::create_directories(config.out_dir);
  numgrid::WriteFileAtomic(config.out_dir / "eval.csv", csv);
  numgrid::WriteFileAtomic(
      config.out_dir / "eval.json",
      internal::Dump({{"checkpoint", config.checkpoint_path().string()}, {"reports", reports}}));
  return rows;
}

std::vector<SweepRow> Sweep(const ExperimentConfig& config, SweepAxis axis, std::ostream& log,
                            ModelCache* cache) {
  config.Validate();
  struct Run {
    std::string value;
    attnet::ModelConfig model;
    std::string split;
  };
  std::vector<Run> runs;
  switch (axis) {
    case SweepAxis::kPatch:
      for (int p : config.sweep_patches) {
        attnet::ModelConfig m = config.model;
        m.patch = p;
        runs.push_back({std::to_string(p), m, "test"});
      }
      break;
    case SweepAxis::kTasks:
      for (const auto& tasks : config.sweep_tasks) {
        attnet::ModelConfig m = config.model;
        m.tasks = tasks;
        m.methods.clear();
        for (Task t : tasks) {
          const auto it = std::find(config.model.tasks.begin(), config.model.tasks.end(), t);
          m.methods.push_back(
              it == config.model.tasks.end()
                  ? uncert::DefaultMethod(t)
                  : config.model.method(static_cast<int>(it - config.model.tasks.begin())));
        }
        runs.push_back({TaskSetName(tasks), m, "test"});
      }
      break;
    case SweepAxis::kUncertainty:
      for (uncert::Method method : config.sweep_methods) {
        attnet::ModelConfig m = config.model;
        m.methods.clear();
        for (int i = 0; i < m.n_tasks(); ++i) m.methods.push_back(config.model.method(i));
        m.methods[m.target_index()] = method;
        runs.push_back({std::string(uncert::MethodName(method)), m, "test"});
      }
      break;
    case SweepAxis::kShift:
      for (ShiftKind s : config.sweep_shifts) {
        runs.push_back({std::string(synthworld::ShiftName(s)), config.model, ShiftSplit(s)});
      }
      break;
  }
  if (runs.empty()) throw UsageError("sweep: no values for axis " + std::string(SweepAxisName(axis)));
  std::set<std::string> seen;
  for (const Run& run : runs) {
    run.model.Validate();
    if (!seen.insert(run.value).second) throw UsageError("sweep: duplicate value " + run.value);
  }

  ModelCache local;
  ModelCache& trained = cache != nullptr ? *cache : local;
  std::vector<SweepRow> rows;
  const fs::path sweep_dir = config.out_dir / ("sweep_" + std::string(SweepAxisName(axis)));
  for (const Run& run : runs) {
    log << "sweep " << SweepAxisName(axis) << "=" << run.value << "\n";
    const std::string key = TrainingKey(config, run.model);
    auto it = trained.find(key);
    if (it == trained.end()) {
      const fs::path dir = sweep_dir / run.value;
      it = trained
               .emplace(key, TrainOn(config, run.model, dir / "model.ckpt", dir / "loss.csv", log,
                                     nullptr))
               .first;
    }
    const Manifest manifest = EnsureSplit(config, run.split, log);
    const std::vector<attnet::Example> examples =
        attnet::LoadExamples(config.data_dir(run.split), manifest, run.model);
    SweepRow row{run.value,
                 metrics::EvaluateLoaded(examples, run.model, &it->second, metrics::Source::kFused),
                 metrics::EvaluateLoaded(examples, run.model, nullptr, metrics::Source::kRaw)};
    log << "  zncc fused " << metrics::FormatMetric(row.fused.mean_zncc) << " raw "
        << metrics::FormatMetric(row.raw.mean_zncc) << "\n";
    rows.push_back(std::move(row));
  }
  fs::create_directories(config.out_dir);
  numgrid::WriteFileAtomic(config.out_dir / ("sweep_" + std::string(SweepAxisName(axis)) + ".csv"),
                           SweepCsv(axis, rows));
  return rows;
}

std::string SweepCsv(SweepAxis axis, const std::vector<SweepRow>& rows) {
  std::string csv = std::string(SweepAxisName(axis)) + ",zncc_fused,zncc_raw,ap_err,ap_suc,fpr95\n";
  for (const SweepRow& row : rows) {
    csv += row.value + "," + metrics::FormatMetric(row.fused.mean_zncc) + "," +
           metrics::FormatMetric(row.raw.mean_zncc);
    for (double v : {row.fused.ap_error, row.fused.ap_success, row.fused.fpr95}) {
      csv += ",";
      if (row.fused.has_classification) csv += metrics::FormatMetric(v);
    }
    csv += "\n";
  }
  return csv;
}

std::string EncodePgm(const numgrid::Tensor& map) {
  if (map.batch() != 1 || map.channels() != 1) throw ShapeError("EncodePgm: expected [1, 1, H, W]");
  const auto values = map.values();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = values.empty() ? 0.0 : *lo_it;
  const double span = values.empty() ? 0.0 : *hi_it - lo;
  std::string out = "P5\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) +
                    "\n255\n";
  for (float v : values) {
    const double t = span > 0 ? (v - lo) / span : 0.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(t * 255.0))));
  }
  return out;
}

}  // namespace attnfuse::harness
