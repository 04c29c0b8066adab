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

#include "attnfuse/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attnfuse/errors.h"

namespace attnfuse::metrics {
namespace {

struct Counts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

Counts CheckBinary(std::span<const double> scores, std::span<const std::uint8_t> labels,
                   const char* what) {
  if (scores.size() != labels.size()) {
    throw ShapeError(std::string(what) + ": scores and labels differ in length");
  }
  Counts c;
  for (std::uint8_t l : labels) (l ? c.positives : c.negatives)++;
  if (c.positives == 0 || c.negatives == 0) {
    throw UndefinedMetricError(std::string(what) + " needs both positive and negative labels");
  }
  return c;
}

// Indices ordered by descending score; equal scores stay in input order.
std::vector<std::size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

ZnccResult Zncc(const Tensor& estimate, const Tensor& error) {
  if (estimate.dims() != error.dims()) {
    throw ShapeError("zncc: " + estimate.dims().ToString() + " vs " + error.dims().ToString());
  }
  const std::size_t n = estimate.size();
  if (n == 0) return {0.0, true};
  double mean_e = 0, mean_t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_e += estimate[i];
    mean_t += error[i];
  }
  mean_e /= static_cast<double>(n);
  mean_t /= static_cast<double>(n);
  double cross = 0, var_e = 0, var_t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = estimate[i] - mean_e, b = error[i] - mean_t;
    cross += a * b;
    var_e += a * a;
    var_t += b * b;
  }
  if (var_e <= 0 || var_t <= 0) return {0.0, true};
  return {std::clamp(cross / (std::sqrt(var_e) * std::sqrt(var_t)), -1.0, 1.0), false};
}

Tensor MisclassificationLabels(const Tensor& probs, const Tensor& labels) {
  const numgrid::Dims& d = probs.dims();
  if (labels.dims() != numgrid::Dims{d.batch, 1, d.height, d.width}) {
    throw ShapeError("misclassification labels: " + d.ToString() + " vs " +
                     labels.dims().ToString());
  }
  Tensor out(labels.dims());
  for (int n = 0; n < d.batch; ++n) {
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        int best = 0;
        for (int c = 1; c < d.channels; ++c) {
          if (probs(n, c, y, x) > probs(n, best, y, x)) best = c;
        }
        out(n, 0, y, x) = static_cast<float>(best) != labels(n, 0, y, x) ? 1.0f : 0.0f;
      }
    }
  }
  return out;
}

double AveragePrecision(std::span<const double> scores, std::span<const std::uint8_t> labels,
                        Positive positive) {
  std::vector<double> s(scores.begin(), scores.end());
  std::vector<std::uint8_t> l(labels.begin(), labels.end());
  if (positive == Positive::kSuccess) {
    for (double& v : s) v = -v;
    for (std::uint8_t& v : l) v = v ? 0 : 1;
  }
  const Counts counts = CheckBinary(s, l, "average precision");
  const std::vector<std::size_t> order = DescendingOrder(s);
  double ap = 0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t group_tp = 0, j = i;
    for (; j < order.size() && s[order[j]] == s[order[i]]; ++j) group_tp += l[order[j]];
    tp += group_tp;
    seen = j;
    if (group_tp > 0) {
      ap += (static_cast<double>(group_tp) / counts.positives) *
            (static_cast<double>(tp) / static_cast<double>(seen));
    }
    i = j;
  }
  return ap;
}

double FprAt95Tpr(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const Counts counts = CheckBinary(scores, labels, "fpr at 95% tpr");
  const std::vector<std::size_t> order = DescendingOrder(scores);
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    for (; j < order.size() && scores[order[j]] == scores[order[i]]; ++j) {
      (labels[order[j]] ? tp : fp)++;
    }
    // TPR >= 0.95 in exact integer arithmetic. FPR only grows as the
    // threshold drops, so the first admissible threshold is optimal.
    if (20 * tp >= 19 * counts.positives) {
      return static_cast<double>(fp) / static_cast<double>(counts.negatives);
    }
    i = j;
  }
  return 1.0;
}

}  // namespace attnfuse::metrics
