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

#ifndef ATTNFUSE_METRICS_EVALUATE_H_
#define ATTNFUSE_METRICS_EVALUATE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "attnfuse/attnet/data.h"
#include "attnfuse/attnet/model.h"
#include "attnfuse/numgrid/tensor.h"
#include "attnfuse/synthworld/dataset.h"

namespace attnfuse::metrics {

enum class Source : std::uint8_t { kFused, kRaw };

std::string_view SourceName(Source s);

struct MetricReport {
  synthworld::Task target = synthworld::Task::kSemantic;
  std::vector<double> zncc;           // per sample
  std::vector<bool> zncc_degenerate;  // per sample
  double mean_zncc = 0;
  // Pooled over all pixels of the split; classification targets only.
  bool has_classification = false;
  double ap_error = 0;
  double ap_success = 0;
  double fpr95 = 0;
  std::map<std::string, std::string> echo;

  int samples() const { return static_cast<int>(zncc.size()); }
};

using EstimateFn = std::function<numgrid::Tensor(const attnet::Example&)>;

// Per-sample ZNCC against each example's error map; pooled AP and FPR95 over
// misclassified pixels when the examples carry semantic probabilities.
MetricReport EvaluateExamples(std::span<const attnet::Example> examples, synthworld::Task target,
                              const EstimateFn& estimate);

// Fused: the model's estimate. Raw: the target task's normalized uncertainty.
// `model` may be null for kRaw.
MetricReport EvaluateDataset(const std::filesystem::path& root,
                             const synthworld::Manifest& manifest,
                             const attnet::ModelConfig& config, attnet::AttentionModel* model,
                             Source source);
MetricReport EvaluateLoaded(std::span<const attnet::Example> examples,
                            const attnet::ModelConfig& config, attnet::AttentionModel* model,
                            Source source);

// Full per-sample detail.
std::string ReportJson(const MetricReport& report);

// Key columns followed by "samples,zncc,ap_err,ap_suc,fpr95". Non-classification
// targets leave the pooled columns empty.
std::string ReportCsvHeader(std::span<const std::string> key_columns);
std::string ReportCsvRow(std::span<const std::string> keys, const MetricReport& report);

// Fixed-precision number formatting shared by every CSV writer.
std::string FormatMetric(double value);

}  // namespace attnfuse::metrics

#endif  // ATTNFUSE_METRICS_EVALUATE_H_
