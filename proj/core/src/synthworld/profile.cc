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

#include "attnfuse/synthworld/profile.h"

#include <algorithm>
#include <set>
#include <string>

#include "attnfuse/errors.h"
#include "src/synthworld/unit_hash.h"

namespace attnfuse::synthworld {
namespace {

constexpr float kFogGrowth = 1.5f;

bool HasEffect(const FailureRule& rule, Confidence c) {
  return std::any_of(rule.effects.begin(), rule.effects.end(),
                     [c](const FailureEffect& e) { return e.confidence == c; });
}

bool InRegion(const RegionSelector& region, const Scene& scene,
              const SceneObject* object, int y, int x) {
  switch (region.kind) {
    case RegionKind::kClass:
      return static_cast<int>(scene.semantic(0, 0, y, x)) == region.class_id;
    case RegionKind::kAnomaly:
      return object != nullptr && object->class_id == scene.num_classes - 1;
    case RegionKind::kDepthBand: {
      const float d = scene.depth(0, 0, y, x);
      return d >= region.depth_low && d <= region.depth_high;
    }
  }
  return false;
}

}  // namespace

std::string_view ConfidenceName(Confidence c) {
  return c == Confidence::kCalibrated ? "calibrated" : "overconfident";
}

Confidence ParseConfidence(std::string_view name) {
  if (name == "calibrated") return Confidence::kCalibrated;
  if (name == "overconfident") return Confidence::kOverconfident;
  throw UsageError("unknown confidence behavior '" + std::string(name) + "'");
}

std::string_view RegionKindName(RegionKind k) {
  switch (k) {
    case RegionKind::kClass: return "class";
    case RegionKind::kDepthBand: return "depth_band";
    case RegionKind::kAnomaly: return "anomaly";
  }
  return "unknown";
}

RegionKind ParseRegionKind(std::string_view name) {
  for (RegionKind k : {RegionKind::kClass, RegionKind::kDepthBand, RegionKind::kAnomaly}) {
    if (RegionKindName(k) == name) return k;
  }
  throw UsageError("unknown region kind '" + std::string(name) + "'");
}

std::string_view ShiftName(ShiftKind k) {
  switch (k) {
    case ShiftKind::kNone: return "none";
    case ShiftKind::kFog: return "fog";
    case ShiftKind::kNight: return "night";
  }
  return "unknown";
}

ShiftKind ParseShift(std::string_view name) {
  for (ShiftKind k : {ShiftKind::kNone, ShiftKind::kFog, ShiftKind::kNight}) {
    if (ShiftName(k) == name) return k;
  }
  throw UsageError("unknown shift '" + std::string(name) + "'");
}

void CorruptionProfile::Validate(int num_classes) const {
  if (ensemble_size < 2) throw UsageError("profile: ensemble size must be >= 2");
  if (!(ensemble_noise >= 0.0f)) throw UsageError("profile: negative ensemble noise");
  std::set<std::string> names;
  for (const FailureRule& rule : rules) {
    const std::string where = "profile rule '" + rule.name + "': ";
    if (rule.name.empty()) throw UsageError("profile: rule without a name");
    if (!names.insert(rule.name).second) throw UsageError(where + "duplicate name");
    const RegionSelector& r = rule.region;
    if (r.kind == RegionKind::kClass && (r.class_id < 0 || r.class_id >= num_classes)) {
      throw UsageError(where + "class id out of range");
    }
    if (r.kind == RegionKind::kDepthBand && !(r.depth_high > r.depth_low)) {
      throw UsageError(where + "empty depth band");
    }
    if (!(r.activation >= 0.0f && r.activation <= 1.0f)) {
      throw UsageError(where + "activation must be in [0, 1]");
    }
    if (r.tile < 1) throw UsageError(where + "tile must be positive");
    if (rule.effects.empty()) throw UsageError(where + "no effects");
    std::set<Task> tasks;
    for (const FailureEffect& e : rule.effects) {
      if (!tasks.insert(e.task).second) throw UsageError(where + "task listed twice");
    }
  }
}

bool HasComplementarity(const CorruptionProfile& profile) {
  for (Task main : {Task::kSemantic, Task::kDepth}) {
    bool found = false;
    for (const FailureRule& rule : profile.rules) {
      bool blind = false, seen_elsewhere = false;
      for (const FailureEffect& e : rule.effects) {
        if (e.task == main && e.confidence == Confidence::kOverconfident) blind = true;
        if (e.task != main && e.confidence == Confidence::kCalibrated) {
          seen_elsewhere = true;
        }
      }
      found = found || (blind && seen_elsewhere);
    }
    if (!found) return false;
  }
  return true;
}

CorruptionProfile DefaultProfile(int num_classes) {
  using C = Confidence;
  CorruptionProfile p;
  auto klass = [](int id) {
    RegionSelector r;
    r.kind = RegionKind::kClass;
    r.class_id = id;
    r.activation = 0.5f;
    return r;
  };
  RegionSelector anomaly;
  anomaly.kind = RegionKind::kAnomaly;
  anomaly.activation = 0.5f;
  RegionSelector far;
  far.kind = RegionKind::kDepthBand;
  far.depth_low = 7.0f;
  far.depth_high = 10.0f;
  far.activation = 0.5f;

  p.rules.push_back({"anomaly", anomaly,
                     {{Task::kSemantic, C::kOverconfident}, {Task::kDepth, C::kCalibrated}}});
  // Regular classes live in [1, K-2].
  const int regular = num_classes - 2;
  if (regular >= 1) {
    p.rules.push_back({"sem_visible", klass(1), {{Task::kSemantic, C::kCalibrated}}});
  }
  p.rules.push_back({"far_band", far, {{Task::kSemantic, C::kCalibrated}}});
  if (regular >= 2) {
    p.rules.push_back({"depth_blind_normal", klass(2),
                       {{Task::kDepth, C::kOverconfident}, {Task::kNormal, C::kCalibrated}}});
  }
  if (regular >= 3) {
    p.rules.push_back({"depth_blind_instance", klass(3),
                       {{Task::kDepth, C::kOverconfident}, {Task::kInstance, C::kCalibrated}}});
  }
  if (regular >= 4) {
    p.rules.push_back({"depth_visible", klass(4), {{Task::kDepth, C::kCalibrated}}});
  }
  return p;
}

CorruptionProfile ShiftProfile(const CorruptionProfile& profile, ShiftKind kind) {
  if (profile.shift != ShiftKind::kNone) {
    throw UsageError("profile is already shifted (" + std::string(ShiftName(profile.shift)) + ")");
  }
  if (kind == ShiftKind::kNone) throw UsageError("shift kind must be fog or night");
  CorruptionProfile out = profile;
  out.shift = kind;
  if (kind == ShiftKind::kFog) {
    for (FailureRule& rule : out.rules) {
      RegionSelector& r = rule.region;
      if (r.kind != RegionKind::kDepthBand) continue;
      const float grown = r.activation * kFogGrowth;
      if (grown <= 1.0f) {
        r.activation = grown;
      } else {
        r.depth_low -= (kFogGrowth - 1.0f) * (r.depth_high - r.depth_low);
      }
    }
  } else {
    bool convert = true;
    for (FailureRule& rule : out.rules) {
      if (HasEffect(rule, Confidence::kOverconfident)) continue;
      for (FailureEffect& e : rule.effects) {
        if (e.confidence != Confidence::kCalibrated) continue;
        if (convert) e.confidence = Confidence::kOverconfident;
        convert = !convert;
      }
    }
  }
  return out;
}

RuleAssignment AssignRules(const Scene& scene, const CorruptionProfile& profile,
                           std::uint64_t seed) {
  const int r = scene.resolution();
  RuleAssignment out;
  out.resolution = r;
  for (int t = 0; t < 4; ++t) {
    out.rule[t].assign(static_cast<std::size_t>(r) * r, RuleAssignment::kNone);
    out.unit[t].assign(static_cast<std::size_t>(r) * r, 0);
  }
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) {
      const int id = static_cast<int>(scene.instance(0, 0, y, x));
      const SceneObject* object = id > 0 ? &scene.objects[id - 1] : nullptr;
      const std::size_t pix = static_cast<std::size_t>(y) * r + x;
      for (std::size_t ri = 0; ri < profile.rules.size(); ++ri) {
        const FailureRule& rule = profile.rules[ri];
        if (!InRegion(rule.region, scene, object, y, x)) continue;
        std::uint64_t unit;
        if (rule.region.kind == RegionKind::kDepthBand || object == nullptr) {
          const int tile = rule.region.tile;
          const int tiles_per_row = (r + tile - 1) / tile;
          unit = internal::kTileKeyBase +
                 static_cast<std::uint64_t>((y / tile) * tiles_per_row + x / tile);
        } else {
          unit = static_cast<std::uint64_t>(object->instance_id);
        }
        if (internal::HashUniform({seed, 0xac71, ri, unit}) >= rule.region.activation) {
          continue;
        }
        for (const FailureEffect& e : rule.effects) {
          const int t = static_cast<int>(e.task);
          if (out.rule[t][pix] != RuleAssignment::kNone) continue;
          out.rule[t][pix] = static_cast<int>(ri);
          out.unit[t][pix] = unit;
        }
      }
    }
  }
  return out;
}

RuleAssignment MirrorAssignment(const RuleAssignment& assignment) {
  RuleAssignment out = assignment;
  const int r = assignment.resolution;
  for (int t = 0; t < 4; ++t) {
    for (int y = 0; y < r; ++y) {
      const std::size_t row = static_cast<std::size_t>(y) * r;
      std::reverse(out.rule[t].begin() + row, out.rule[t].begin() + row + r);
      std::reverse(out.unit[t].begin() + row, out.unit[t].begin() + row + r);
    }
  }
  return out;
}

}  // namespace attnfuse::synthworld
