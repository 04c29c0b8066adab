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

#include "attnfuse/metrics/evaluate.h"

#include <algorithm>
#include <cstdio>

#include "attnfuse/attnet/train.h"
#include "attnfuse/errors.h"
#include "attnfuse/metrics/metrics.h"
#include "src/common/json_convert.h"

namespace attnfuse::metrics {

std::string_view SourceName(Source s) { return s == Source::kFused ? "fused" : "raw"; }

MetricReport EvaluateExamples(std::span<const attnet::Example> examples, synthworld::Task target,
                              const EstimateFn& estimate) {
  MetricReport report;
  report.target = target;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  const bool classification =
      target == synthworld::Task::kSemantic && !examples.empty() &&
      std::all_of(examples.begin(), examples.end(),
                  [](const attnet::Example& e) { return !e.target_probs.empty(); });
  double total = 0;
  for (const attnet::Example& ex : examples) {
    const numgrid::Tensor e = estimate(ex);
    const ZnccResult z = Zncc(e, ex.error);
    report.zncc.push_back(z.value);
    report.zncc_degenerate.push_back(z.degenerate);
    total += z.value;
    if (classification) {
      const numgrid::Tensor wrong = MisclassificationLabels(ex.target_probs, ex.target_labels);
      for (std::size_t i = 0; i < e.size(); ++i) {
        scores.push_back(e[i]);
        labels.push_back(wrong[i] != 0.0f ? 1 : 0);
      }
    }
  }
  report.mean_zncc = examples.empty() ? 0.0 : total / static_cast<double>(examples.size());
  if (classification) {
    report.has_classification = true;
    report.ap_error = AveragePrecision(scores, labels, Positive::kError);
    report.ap_success = AveragePrecision(scores, labels, Positive::kSuccess);
    report.fpr95 = FprAt95Tpr(scores, labels);
  }
  return report;
}

MetricReport EvaluateLoaded(std::span<const attnet::Example> examples,
                            const attnet::ModelConfig& config, attnet::AttentionModel* model,
                            Source source) {
  EstimateFn fn;
  if (source == Source::kFused) {
    if (model == nullptr) throw UsageError("fused evaluation needs a model");
    fn = [model](const attnet::Example& ex) { return attnet::PredictFused(*model, ex); };
  } else {
    const int index = config.target_index();
    fn = [index](const attnet::Example& ex) { return ex.uncertainties[index]; };
  }
  MetricReport report = EvaluateExamples(examples, config.target, fn);
  report.echo["source"] = SourceName(source);
  report.echo["target"] = synthworld::TaskName(config.target);
  report.echo["config"] = internal::ToJson(config).dump();
  return report;
}

MetricReport EvaluateDataset(const std::filesystem::path& root,
                             const synthworld::Manifest& manifest,
                             const attnet::ModelConfig& config, attnet::AttentionModel* model,
                             Source source) {
  const std::vector<attnet::Example> examples = attnet::LoadExamples(root, manifest, config);
  return EvaluateLoaded(examples, config, model, source);
}

std::string ReportJson(const MetricReport& r) {
  internal::Json samples = internal::Json::array();
  for (int i = 0; i < r.samples(); ++i) {
    samples.push_back({{"index", i}, {"zncc", r.zncc[i]}, {"degenerate", r.zncc_degenerate[i]}});
  }
  internal::Json j{{"target", synthworld::TaskName(r.target)},
                   {"samples", r.samples()},
                   {"mean_zncc", r.mean_zncc},
                   {"per_sample", samples},
                   {"echo", r.echo}};
  if (r.has_classification) {
    j["ap_error"] = r.ap_error;
    j["ap_success"] = r.ap_success;
    j["fpr95"] = r.fpr95;
  }
  return internal::Dump(j);
}

std::string FormatMetric(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10f", value);
  return buf;
}

std::string ReportCsvHeader(std::span<const std::string> key_columns) {
  std::string out;
  for (const std::string& k : key_columns) out += k + ",";
  return out + "samples,zncc,ap_err,ap_suc,fpr95\n";
}

std::string ReportCsvRow(std::span<const std::string> keys, const MetricReport& r) {
  std::string row;
  for (const std::string& k : keys) row += k + ",";
  row += std::to_string(r.samples()) + "," + FormatMetric(r.mean_zncc);
  for (double v : {r.ap_error, r.ap_success, r.fpr95}) {
    row += ",";
    if (r.has_classification) row += FormatMetric(v);
  }
  return row + "\n";
}

}  // namespace attnfuse::metrics
