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

#ifndef ATTNFUSE_SYNTHWORLD_PREDICTIONS_H_
#define ATTNFUSE_SYNTHWORLD_PREDICTIONS_H_

#include <array>
#include <cstdint>

#include "attnfuse/numgrid/tensor.h"
#include "attnfuse/synthworld/profile.h"
#include "attnfuse/synthworld/scene.h"

namespace attnfuse::synthworld {

struct TaskOutput {
  numgrid::Tensor main;      // [1, C, R, R]
  numgrid::Tensor ensemble;  // [M, C, R, R]; empty for instance
  numgrid::Tensor flipped;   // [1, C, R, R], mirrored back; empty for instance

  bool present() const { return !main.empty(); }
};

// Semantic rasters hold K class probabilities. Instance rasters hold the
// predicted id in channel 0 and its confidence in channel 1.
struct TaskPredictions {
  std::array<TaskOutput, 4> outputs;

  const TaskOutput& at(Task t) const { return outputs[static_cast<int>(t)]; }
  TaskOutput& at(Task t) { return outputs[static_cast<int>(t)]; }
};

// Deterministic in (scene, profile, seed). The instance task is simulated on a
// separate seed stream, so enabling it leaves the other tasks unchanged.
TaskPredictions SimulatePredictions(const Scene& scene,
                                    const CorruptionProfile& profile,
                                    std::uint64_t seed);

// The image the perception stack observes under the profile's shift.
numgrid::Tensor ObservedImage(const Scene& scene, const CorruptionProfile& profile,
                              std::uint64_t seed);

}  // namespace attnfuse::synthworld

#endif  // ATTNFUSE_SYNTHWORLD_PREDICTIONS_H_
