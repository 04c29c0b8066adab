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

#ifndef ATTNFUSE_METRICS_METRICS_H_
#define ATTNFUSE_METRICS_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attnfuse/numgrid/tensor.h"

namespace attnfuse::metrics {

using numgrid::Tensor;

struct ZnccResult {
  double value = 0;
  bool degenerate = false;  // a map was constant; value is 0
};

// Zero-mean normalized cross-correlation over all elements, in double.
// Throws ShapeError on dims mismatch.
ZnccResult Zncc(const Tensor& estimate, const Tensor& error);

// 1 where the argmax class (lowest index on ties) differs from the label.
// probs [N, K, H, W], labels [N, 1, H, W].
Tensor MisclassificationLabels(const Tensor& probs, const Tensor& labels);

enum class Positive : std::uint8_t { kError, kSuccess };

// Step-wise average precision with tied scores forming one threshold. For
// kSuccess, labels are inverted and scores negated. Throws
// UndefinedMetricError unless both classes occur.
double AveragePrecision(std::span<const double> scores, std::span<const std::uint8_t> labels,
                        Positive positive = Positive::kError);

// Lowest false positive rate over thresholds (score >= t) reaching a true
// positive rate of at least 0.95.
double FprAt95Tpr(std::span<const double> scores, std::span<const std::uint8_t> labels);

}  // namespace attnfuse::metrics

#endif  // ATTNFUSE_METRICS_METRICS_H_
