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

#include "attnfuse/numgrid/grad_check.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace attnfuse::numgrid {

GradCheckResult GradCheck(std::span<Parameter64* const> params,
                          const LossBuilder& build_loss,
                          const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0)) throw UsageError("grad_check: epsilon must be positive");
  for (Parameter64* p : params) p->ZeroGrad();
  {
    Graph64 graph;
    Var64 loss = build_loss(graph);
    graph.Backward(loss);
  }
  auto evaluate = [&]() {
    Graph64 graph;
    return build_loss(graph).value()[0];
  };

  GradCheckResult result;
  for (Parameter64* p : params) {
    auto values = p->mutable_value().values();
    const auto analytic = p->grad().values();
    std::size_t stride = 1;
    if (options.max_elements_per_parameter > 0 &&
        values.size() > options.max_elements_per_parameter) {
      stride = values.size() / options.max_elements_per_parameter;
    }
    for (std::size_t i = 0; i < values.size(); i += stride) {
      const double original = values[i];
      values[i] = original + options.epsilon;
      const double up = evaluate();
      values[i] = original - options.epsilon;
      const double down = evaluate();
      values[i] = original;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double error = std::abs(analytic[i] - numeric) /
                           std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
      result.max_relative_error = std::max(result.max_relative_error, error);
      ++result.elements_checked;
    }
  }
  return result;
}

}  // namespace attnfuse::numgrid
