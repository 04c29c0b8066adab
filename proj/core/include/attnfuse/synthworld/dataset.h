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

#ifndef ATTNFUSE_SYNTHWORLD_DATASET_H_
#define ATTNFUSE_SYNTHWORLD_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "attnfuse/numgrid/tensor.h"
#include "attnfuse/synthworld/predictions.h"
#include "attnfuse/synthworld/profile.h"
#include "attnfuse/synthworld/scene.h"

namespace attnfuse::synthworld {

inline constexpr const char* kDatasetFormat = "attnfuse-dataset/1";
inline constexpr const char* kManifestName = "manifest.json";

struct SampleEntry {
  int index = 0;
  std::uint64_t seed = 0;
  std::string dir;  // relative to the dataset root

  friend bool operator==(const SampleEntry&, const SampleEntry&) = default;
};

struct Manifest {
  SceneSpec spec;
  CorruptionProfile profile;
  std::uint64_t base_seed = 0;
  std::vector<SampleEntry> samples;
  std::map<std::string, numgrid::Dims> files;  // per-sample file name -> dims

  std::string ToJson() const;
  // Throws FormatError.
  static Manifest FromJson(const std::string& text);

  bool has_file(const std::string& name) const { return files.count(name) > 0; }

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

// Extra per-sample tensors computed from the simulated sample.
using DerivedMaps = std::function<std::vector<std::pair<std::string, numgrid::Tensor>>(
    const Scene&, const TaskPredictions&)>;

struct BuildOptions {
  int threads = 0;  // 0: hardware concurrency, capped by ATTNFUSE_THREADS
  DerivedMaps derived;
};

// Every tensor written for one sample, keyed by file stem.
std::vector<std::pair<std::string, numgrid::Tensor>> SampleTensors(
    const SceneSpec& spec, const CorruptionProfile& profile, std::uint64_t seed,
    const DerivedMaps& derived);

// Writes samples/<i>/<name>.ngt and manifest.json under out_dir. Sample i
// uses seed base_seed + i. Throws IoError naming the offending path.
Manifest BuildDataset(const SceneSpec& spec, const CorruptionProfile& profile, int count,
                      const std::filesystem::path& out_dir, std::uint64_t base_seed,
                      const BuildOptions& options = {});

// Throws IoError or FormatError.
Manifest LoadManifest(const std::filesystem::path& root);

std::filesystem::path SampleFile(const std::filesystem::path& root, const SampleEntry& entry,
                                 const std::string& name);

// Worker count after applying the ATTNFUSE_THREADS cap.
int EffectiveThreads(int requested);

}  // namespace attnfuse::synthworld

#endif  // ATTNFUSE_SYNTHWORLD_DATASET_H_
