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

#ifndef ATTNFUSE_SYNTHWORLD_PROFILE_H_
#define ATTNFUSE_SYNTHWORLD_PROFILE_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "attnfuse/synthworld/scene.h"

namespace attnfuse::synthworld {

enum class Confidence : std::uint8_t { kCalibrated, kOverconfident };
enum class RegionKind : std::uint8_t { kClass, kDepthBand, kAnomaly };
enum class ShiftKind : std::uint8_t { kNone, kFog, kNight };

std::string_view ConfidenceName(Confidence c);
Confidence ParseConfidence(std::string_view name);
std::string_view RegionKindName(RegionKind k);
RegionKind ParseRegionKind(std::string_view name);
std::string_view ShiftName(ShiftKind k);
ShiftKind ParseShift(std::string_view name);

// Which pixels a rule may affect. Class and anomaly regions are activated per
// object; depth bands are activated per tile x tile block.
struct RegionSelector {
  RegionKind kind = RegionKind::kClass;
  int class_id = 0;
  float depth_low = 0;
  float depth_high = 0;
  float activation = 1;  // probability that a unit fails
  int tile = 8;

  friend bool operator==(const RegionSelector&, const RegionSelector&) = default;
};

struct FailureEffect {
  Task task = Task::kSemantic;
  Confidence confidence = Confidence::kCalibrated;

  friend bool operator==(const FailureEffect&, const FailureEffect&) = default;
};

struct FailureRule {
  std::string name;
  RegionSelector region;
  std::vector<FailureEffect> effects;

  friend bool operator==(const FailureRule&, const FailureRule&) = default;
};

struct CorruptionProfile {
  std::vector<FailureRule> rules;
  int ensemble_size = 8;
  float ensemble_noise = 0.2f;
  ShiftKind shift = ShiftKind::kNone;
  bool instance_enabled = false;

  // Structural checks only. Throws UsageError.
  void Validate(int num_classes) const;

  friend bool operator==(const CorruptionProfile&,
                         const CorruptionProfile&) = default;
};

// True when semantic and depth each have a rule in which they are
// overconfident while some other task is calibrated.
bool HasComplementarity(const CorruptionProfile& profile);

CorruptionProfile DefaultProfile(int num_classes);

// Throws UsageError if the profile is already shifted or kind is kNone.
CorruptionProfile ShiftProfile(const CorruptionProfile& profile, ShiftKind kind);

// Per-task rule assignment of every pixel of a scene.
struct RuleAssignment {
  static constexpr int kNone = -1;

  int resolution = 0;
  std::array<std::vector<int>, 4> rule;             // index into profile.rules
  std::array<std::vector<std::uint64_t>, 4> unit;   // failing unit key

  int rule_at(Task t, int y, int x) const {
    return rule[static_cast<int>(t)][y * resolution + x];
  }
};

RuleAssignment AssignRules(const Scene& scene, const CorruptionProfile& profile,
                           std::uint64_t seed);
RuleAssignment MirrorAssignment(const RuleAssignment& assignment);

}  // namespace attnfuse::synthworld

#endif  // ATTNFUSE_SYNTHWORLD_PROFILE_H_
