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

#include "attnfuse/synthworld/scene.h"

#include "attnfuse/numgrid/kernels.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace attnfuse::synthworld {
namespace {

constexpr std::array<std::array<float, 3>, 8> kPalette = {{
    {0.45f, 0.42f, 0.38f},  // ground
    {0.15f, 0.25f, 0.75f},
    {0.75f, 0.55f, 0.20f},
    {0.85f, 0.85f, 0.25f},
    {0.20f, 0.65f, 0.25f},
    {0.60f, 0.20f, 0.20f},
    {0.30f, 0.75f, 0.80f},
    {0.55f, 0.35f, 0.65f},
}};
constexpr std::array<float, 3> kAnomalyColor = {0.95f, 0.10f, 0.90f};
constexpr float kAnomalyWeight = 0.1f;
constexpr float kAnomalyShade = 0.93f;

float GroundDepth(const SceneSpec& spec, int y) {
  const float t = spec.resolution > 1
                      ? static_cast<float>(y) / static_cast<float>(spec.resolution - 1)
                      : 1.0f;
  return spec.depth_max + (spec.depth_min - spec.depth_max) * t;
}

std::array<float, 3> GroundNormal(int y, int resolution) {
  const float t = resolution > 1 ? static_cast<float>(y) / (resolution - 1) : 1.0f;
  const float ny = -(0.3f + 0.6f * t);
  const float len = std::sqrt(ny * ny + 1.0f);
  return {0.0f, ny / len, 1.0f / len};
}

int DrawClass(const SceneSpec& spec, std::mt19937_64& rng) {
  const int regular = spec.num_classes - 2;
  if (regular <= 0) return spec.anomaly_class();
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  if (u(rng) < kAnomalyWeight) return spec.anomaly_class();
  std::uniform_int_distribution<int> pick(1, regular);
  return pick(rng);
}

}  // namespace

std::string_view TaskName(Task task) {
  switch (task) {
    case Task::kSemantic: return "semantic";
    case Task::kDepth: return "depth";
    case Task::kNormal: return "normal";
    case Task::kInstance: return "instance";
  }
  return "unknown";
}

Task ParseTask(std::string_view name) {
  for (Task t : kAllTasks) {
    if (TaskName(t) == name) return t;
  }
  throw UsageError("unknown task '" + std::string(name) + "'");
}

int TaskChannels(Task task, int num_classes) {
  switch (task) {
    case Task::kSemantic: return num_classes;
    case Task::kDepth: return 1;
    case Task::kNormal: return 3;
    case Task::kInstance: return 2;
  }
  throw UsageError("unknown task");
}

void SceneSpec::Validate() const {
  if (num_classes < 2) throw UsageError("scene spec: need at least 2 classes");
  if (resolution < 4 || resolution % 4 != 0) {
    throw UsageError("scene spec: resolution must be a positive multiple of 4");
  }
  if (!(depth_min > 0.0f) || !(depth_max > depth_min)) {
    throw UsageError("scene spec: depth range must be positive and increasing");
  }
  if (min_objects < 0 || max_objects < min_objects) {
    throw UsageError("scene spec: bad object count range");
  }
}

bool SceneObject::Covers(int x, int y) const {
  if (shape == Shape::kRectangle) return x >= x0 && x < x1 && y >= y0 && y < y1;
  const float dx = static_cast<float>(x) + 0.5f - cx;
  const float dy = static_cast<float>(y) + 0.5f - cy;
  return dx * dx + dy * dy <= radius * radius;
}

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::array<float, 3> ClassColor(int class_id, int num_classes) {
  if (class_id == num_classes - 1 && num_classes > 2) {
    auto c = ClassColor(kLookAlikeClass, num_classes);
    for (float& v : c) v *= kAnomalyShade;
    return c;
  }
  if (class_id == num_classes - 1 && num_classes > 1) return kAnomalyColor;
  if (class_id < static_cast<int>(kPalette.size())) return kPalette[class_id];
  const std::uint64_t h = MixSeed(0xc01045ULL, static_cast<std::uint64_t>(class_id));
  return {0.15f + 0.7f * static_cast<float>(h & 0xff) / 255.0f,
          0.15f + 0.7f * static_cast<float>((h >> 8) & 0xff) / 255.0f,
          0.15f + 0.7f * static_cast<float>((h >> 16) & 0xff) / 255.0f};
}

Scene GenerateScene(const SceneSpec& spec, std::uint64_t seed) {
  spec.Validate();
  const int r = spec.resolution;
  const float scale = static_cast<float>(r) / 64.0f;
  std::mt19937_64 rng(MixSeed(seed, 0x5ce4e));
  std::uniform_int_distribution<int> count_dist(spec.min_objects, spec.max_objects);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);

  Scene scene;
  scene.num_classes = spec.num_classes;
  const int count = count_dist(rng);
  for (int i = 0; i < count; ++i) {
    SceneObject obj;
    obj.instance_id = i + 1;
    obj.class_id = DrawClass(spec, rng);
    obj.shape = unit(rng) < 0.5f ? Shape::kRectangle : Shape::kCircle;
    const int bottom = static_cast<int>(0.2f * r) +
                       static_cast<int>(unit(rng) * (r - static_cast<int>(0.2f * r)));
    const int center_x = static_cast<int>(unit(rng) * r);
    if (obj.shape == Shape::kRectangle) {
      const int w = std::max(2, static_cast<int>((6.0f + 14.0f * unit(rng)) * scale));
      const int h = std::max(2, static_cast<int>((6.0f + 14.0f * unit(rng)) * scale));
      obj.x0 = center_x - w / 2;
      obj.x1 = obj.x0 + w;
      obj.y1 = bottom + 1;
      obj.y0 = obj.y1 - h;
    } else {
      obj.radius = std::max(1.5f, (3.0f + 7.0f * unit(rng)) * scale);
      obj.cx = static_cast<float>(center_x) + 0.5f;
      obj.cy = static_cast<float>(bottom) + 1.0f - obj.radius;
    }
    obj.depth = GroundDepth(spec, std::min(bottom, r - 1));
    const float sx = -0.6f + 1.2f * unit(rng), sy = -0.6f + 1.2f * unit(rng);
    const float len = std::sqrt(sx * sx + sy * sy + 1.0f);
    obj.normal = {sx / len, sy / len, 1.0f / len};
    obj.brightness = 0.8f + 0.4f * unit(rng);
    scene.objects.push_back(obj);
  }

  const numgrid::Dims one{1, 1, r, r};
  scene.image = numgrid::Tensor(numgrid::Dims{1, 3, r, r});
  scene.semantic = numgrid::Tensor(one);
  scene.depth = numgrid::Tensor(one);
  scene.normal = numgrid::Tensor(numgrid::Dims{1, 3, r, r});
  scene.instance = numgrid::Tensor(one);
  std::normal_distribution<float> noise(0.0f, 0.02f);
  const auto ground_color = ClassColor(0, spec.num_classes);
  for (int y = 0; y < r; ++y) {
    const auto ground_normal = GroundNormal(y, r);
    const float shade = 0.85f + 0.15f * static_cast<float>(y) / std::max(r - 1, 1);
    for (int x = 0; x < r; ++x) {
      const SceneObject* front = nullptr;
      for (const SceneObject& obj : scene.objects) {
        if (obj.Covers(x, y) && (front == nullptr || obj.depth < front->depth)) {
          front = &obj;
        }
      }
      std::array<float, 3> color;
      if (front != nullptr) {
        scene.semantic(0, 0, y, x) = static_cast<float>(front->class_id);
        scene.depth(0, 0, y, x) = front->depth;
        scene.instance(0, 0, y, x) = static_cast<float>(front->instance_id);
        for (int c = 0; c < 3; ++c) scene.normal(0, c, y, x) = front->normal[c];
        const auto base = ClassColor(front->class_id, spec.num_classes);
        for (int c = 0; c < 3; ++c) color[c] = base[c] * front->brightness;
      } else {
        scene.depth(0, 0, y, x) = GroundDepth(spec, y);
        for (int c = 0; c < 3; ++c) scene.normal(0, c, y, x) = ground_normal[c];
        for (int c = 0; c < 3; ++c) color[c] = ground_color[c] * shade;
      }
      for (int c = 0; c < 3; ++c) {
        scene.image(0, c, y, x) = std::clamp(color[c] + noise(rng), 0.0f, 1.0f);
      }
    }
  }
  return scene;
}

Scene MirrorScene(const Scene& scene) {
  Scene out;
  out.num_classes = scene.num_classes;
  out.image = numgrid::MirrorHorizontal(scene.image);
  out.semantic = numgrid::MirrorHorizontal(scene.semantic);
  out.depth = numgrid::MirrorHorizontal(scene.depth);
  out.normal = numgrid::MirrorHorizontal(scene.normal);
  for (float& v : out.normal.plane(0, 0)) v = -v;
  out.instance = numgrid::MirrorHorizontal(scene.instance);
  const int r = scene.resolution();
  out.objects = scene.objects;
  for (SceneObject& obj : out.objects) {
    const int x0 = r - obj.x1, x1 = r - obj.x0;
    obj.x0 = x0;
    obj.x1 = x1;
    obj.cx = static_cast<float>(r) - obj.cx;
    obj.normal[0] = -obj.normal[0];
  }
  return out;
}

}  // namespace attnfuse::synthworld
