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

#ifndef ATTNFUSE_UNCERT_UNCERT_H_
#define ATTNFUSE_UNCERT_UNCERT_H_

// Single-task uncertainty estimators and ground-truth error maps. Every map is
// [N, 1, H, W] with larger values meaning less reliable.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "attnfuse/numgrid/tensor.h"
#include "attnfuse/synthworld/dataset.h"
#include "attnfuse/synthworld/predictions.h"
#include "attnfuse/synthworld/scene.h"

namespace attnfuse::uncert {

using numgrid::Tensor;
using synthworld::Task;

enum class Method : std::uint8_t {
  kSoftmaxEntropy,
  kSoftmaxDistance,
  kEnsemble,
  kFlip,
  kRoi,
};

enum class ErrorKind : std::uint8_t { kCrossEntropy, kL2, kAngular };

enum class EnsembleKind : std::uint8_t { kRegression, kClassification };

inline constexpr double kProbClamp = 1e-7;

std::string_view MethodName(Method m);
Method ParseMethod(std::string_view name);

// Methods computable for a task, default first.
std::vector<Method> MethodsFor(Task task);
Method DefaultMethod(Task task);
// Throws UsageError for the instance task.
ErrorKind ErrorKindFor(Task task);

// probs: [N, K, H, W]. Throws UsageError when K < 2.
Tensor SoftmaxEntropy(const Tensor& probs);
// 1 minus the margin between the two largest probabilities.
Tensor SoftmaxDistance(const Tensor& probs);

// ensemble: [M, C, H, W]. Regression gives the population standard deviation
// across members averaged over channels; classification gives the variation
// ratio of the per-member argmax. Throws UsageError when M < 2.
Tensor EnsembleUncertainty(const Tensor& ensemble, EnsembleKind kind);

// Mean absolute channel difference. Throws ShapeError on dims mismatch.
Tensor FlipUncertainty(const Tensor& pred, const Tensor& flipped_back);

// instance_pred: [N, 2, H, W] with id and confidence channels. Background
// (id 0) maps to 0.5.
Tensor RoiUncertainty(const Tensor& instance_pred);

// gt is a label map for cross entropy and a dense map of pred's shape
// otherwise.
Tensor ErrorMap(ErrorKind kind, const Tensor& pred, const Tensor& gt);

// Per-image min-max normalization onto [0, 1].
Tensor Normalize01(const Tensor& map);

// Dispatches `method` on a task's simulated outputs. Throws UsageError when
// the method does not apply to the task.
Tensor ComputeUncertainty(Task task, Method method, const synthworld::TaskOutput& output);

// File stems used in datasets.
std::string UncertaintyFileName(Task task, Method method);
std::string ErrorFileName(Task task);

// Writes every applicable uncertainty map and the error map of every dense
// task, unnormalized.
synthworld::DerivedMaps StandardDerivedMaps();

}  // namespace attnfuse::uncert

#endif  // ATTNFUSE_UNCERT_UNCERT_H_
