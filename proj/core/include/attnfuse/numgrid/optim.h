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

#ifndef ATTNFUSE_NUMGRID_OPTIM_H_
#define ATTNFUSE_NUMGRID_OPTIM_H_

#include <span>

#include "attnfuse/numgrid/graph.h"

namespace attnfuse::numgrid {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update of every parameter from its current grad.
// Gradients are left untouched; call ZeroGrad before the next accumulation.
template <typename T>
void AdamStep(std::span<BasicParameter<T>* const> params,
              const AdamOptions& options);

template <typename T>
void ZeroGrad(std::span<BasicParameter<T>* const> params) {
  for (BasicParameter<T>* p : params) p->ZeroGrad();
}

}  // namespace attnfuse::numgrid

#endif  // ATTNFUSE_NUMGRID_OPTIM_H_
