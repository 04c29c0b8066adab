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

#ifndef ATTNFUSE_SYNTHWORLD_SCENE_H_
#define ATTNFUSE_SYNTHWORLD_SCENE_H_

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "attnfuse/numgrid/tensor.h"

namespace attnfuse::synthworld {

// Perception tasks simulated for every scene. Order is the canonical task
// order used everywhere (file names, model task lists).
enum class Task : std::uint8_t { kSemantic, kDepth, kNormal, kInstance };

inline constexpr std::array<Task, 4> kAllTasks = {Task::kSemantic, Task::kDepth,
                                                  Task::kNormal, Task::kInstance};

std::string_view TaskName(Task task);
// Throws UsageError on an unknown name.
Task ParseTask(std::string_view name);

// Channels of a task's canonical prediction raster.
int TaskChannels(Task task, int num_classes);

struct SceneSpec {
  int resolution = 64;
  int num_classes = 6;  // class 0 is the ground plane, the last is "anomaly"
  int min_objects = 3;
  int max_objects = 8;
  float depth_min = 1.0f;
  float depth_max = 10.0f;
  std::uint64_t seed = 0;

  int anomaly_class() const { return num_classes - 1; }
  // Throws UsageError when an invariant is broken.
  void Validate() const;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

enum class Shape : std::uint8_t { kRectangle, kCircle };

struct SceneObject {
  int instance_id = 0;  // 1-based
  int class_id = 0;
  Shape shape = Shape::kRectangle;
  // Rectangle: [x0, x1) x [y0, y1). Circle: center (cx, cy), radius r.
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  float cx = 0, cy = 0, radius = 0;
  float depth = 0;
  std::array<float, 3> normal{0, 0, 1};
  float brightness = 1;

  bool Covers(int x, int y) const;
};

struct Scene {
  int num_classes = 0;
  numgrid::Tensor image;     // [1, 3, R, R] in [0, 1]
  numgrid::Tensor semantic;  // [1, 1, R, R] class labels
  numgrid::Tensor depth;     // [1, 1, R, R] scene units
  numgrid::Tensor normal;    // [1, 3, R, R] unit vectors
  numgrid::Tensor instance;  // [1, 1, R, R] 0 = ground
  std::vector<SceneObject> objects;

  int resolution() const { return image.height(); }
};

// Deterministic: identical (spec, seed) produce bit-identical scenes.
Scene GenerateScene(const SceneSpec& spec, std::uint64_t seed);

// Left-right mirror of every map; normals have their x component negated.
// Object geometry is mirrored as well.
Scene MirrorScene(const Scene& scene);

// With three or more classes the anomaly class is a darker shade of this one.
inline constexpr int kLookAlikeClass = 1;

// Base RGB color of a class.
std::array<float, 3> ClassColor(int class_id, int num_classes);

// Stateless 64-bit mixing used to derive independent seeds.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

}  // namespace attnfuse::synthworld

#endif  // ATTNFUSE_SYNTHWORLD_SCENE_H_
