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

#ifndef ATTNFUSE_NUMGRID_GRAD_CHECK_H_
#define ATTNFUSE_NUMGRID_GRAD_CHECK_H_

#include <cstddef>
#include <functional>
#include <span>

#include "attnfuse/numgrid/graph.h"

namespace attnfuse::numgrid {

using Graph64 = BasicGraph<double>;
using Var64 = BasicVar<double>;
using Parameter64 = BasicParameter<double>;

// Builds a scalar loss on a fresh graph. Must be deterministic.
using LossBuilder = std::function<Var64(Graph64&)>;

struct GradCheckOptions {
  double epsilon = 1e-3;
  // Elements checked per parameter; 0 checks every element. When limited,
  // elements are taken at an even stride.
  std::size_t max_elements_per_parameter = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t elements_checked = 0;
};

// Compares reverse-mode gradients with central finite differences in double
// precision. Error per element is |a - n| / max(1e-8, |a| + |n|).
GradCheckResult GradCheck(std::span<Parameter64* const> params,
                          const LossBuilder& build_loss,
                          const GradCheckOptions& options = {});

}  // namespace attnfuse::numgrid

#endif  // ATTNFUSE_NUMGRID_GRAD_CHECK_H_
