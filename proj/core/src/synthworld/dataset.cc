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

#include "attnfuse/synthworld/dataset.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "attnfuse/errors.h"
#include "attnfuse/numgrid/io.h"
#include "src/common/json_convert.h"

namespace attnfuse::synthworld {
namespace {

using internal::Json;
using numgrid::Tensor;

constexpr Task kDenseTasks[] = {Task::kSemantic, Task::kDepth, Task::kNormal};

}  // namespace

int EffectiveThreads(int requested) {
  int n = requested > 0 ? requested
                        : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  if (const char* cap = std::getenv("ATTNFUSE_THREADS")) {
    const int limit = std::atoi(cap);
    if (limit > 0) n = std::min(n, limit);
  }
  return n;
}

std::vector<std::pair<std::string, Tensor>> SampleTensors(const SceneSpec& spec,
                                                          const CorruptionProfile& profile,
                                                          std::uint64_t seed,
                                                          const DerivedMaps& derived) {
  const Scene scene = GenerateScene(spec, seed);
  const TaskPredictions preds = SimulatePredictions(scene, profile, seed);
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("image", ObservedImage(scene, profile, seed));
  out.emplace_back("gt_semantic", scene.semantic);
  out.emplace_back("gt_depth", scene.depth);
  out.emplace_back("gt_normal", scene.normal);
  out.emplace_back("gt_instance", scene.instance);
  for (Task t : kDenseTasks) {
    const std::string name(TaskName(t));
    const TaskOutput& o = preds.at(t);
    out.emplace_back("pred_" + name, o.main);
    out.emplace_back("ens_" + name, o.ensemble);
    out.emplace_back("flip_" + name, o.flipped);
  }
  if (preds.at(Task::kInstance).present()) {
    out.emplace_back("pred_instance", preds.at(Task::kInstance).main);
  }
  if (derived) {
    for (auto& entry : derived(scene, preds)) out.push_back(std::move(entry));
  }
  return out;
}

std::filesystem::path SampleFile(const std::filesystem::path& root, const SampleEntry& entry,
                                 const std::string& name) {
  return root / entry.dir / (name + ".ngt");
}

std::string Manifest::ToJson() const {
  Json samples_json = Json::array();
  for (const SampleEntry& s : samples) {
    samples_json.push_back({{"index", s.index}, {"seed", s.seed}, {"dir", s.dir}});
  }
  Json files_json = Json::object();
  for (const auto& [name, dims] : files) files_json[name] = internal::ToJson(dims);
  const Json j{{"format", kDatasetFormat},
               {"spec", internal::ToJson(spec)},
               {"profile", internal::ToJson(profile)},
               {"base_seed", base_seed},
               {"samples", samples_json},
               {"files", files_json}};
  return internal::Dump(j);
}

Manifest Manifest::FromJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("manifest: ") + e.what(), e.byte);
  }
  try {
    if (internal::ReadRequired<std::string>(j, "format") != kDatasetFormat) {
      throw UsageError("unsupported format tag");
    }
    Manifest m;
    m.spec = internal::SceneSpecFromJson(internal::ReadRequired<Json>(j, "spec"));
    m.profile = internal::ProfileFromJson(internal::ReadRequired<Json>(j, "profile"));
    m.profile.Validate(m.spec.num_classes);
    m.base_seed = internal::ReadRequired<std::uint64_t>(j, "base_seed");
    for (const Json& s : internal::ReadRequired<Json>(j, "samples")) {
      m.samples.push_back({internal::ReadRequired<int>(s, "index"),
                           internal::ReadRequired<std::uint64_t>(s, "seed"),
                           internal::ReadRequired<std::string>(s, "dir")});
    }
    const Json files = internal::ReadRequired<Json>(j, "files");
    if (!files.is_object()) throw UsageError("field 'files' must be an object");
    for (const auto& [name, dims] : files.items()) {
      m.files[name] = internal::DimsFromJson(dims);
    }
    return m;
  } catch (const UsageError& e) {
    throw FormatError(std::string("manifest: ") + e.what(), 0);
  }
}

Manifest BuildDataset(const SceneSpec& spec, const CorruptionProfile& profile, int count,
                      const std::filesystem::path& out_dir, std::uint64_t base_seed,
                      const BuildOptions& options) {
  spec.Validate();
  profile.Validate(spec.num_classes);
  if (count < 0) throw UsageError("sample count must be non-negative");

  Manifest manifest;
  manifest.spec = spec;
  manifest.profile = profile;
  manifest.base_seed = base_seed;
  for (int i = 0; i < count; ++i) {
    manifest.samples.push_back(
        {i, base_seed + static_cast<std::uint64_t>(i), "samples/" + std::to_string(i)});
  }

  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        const SampleEntry& entry = manifest.samples[i];
        auto tensors = SampleTensors(spec, profile, entry.seed, options.derived);
        for (const auto& [name, tensor] : tensors) {
          numgrid::WriteNgt(SampleFile(out_dir, entry, name), tensor);
        }
        if (i == 0) {
          std::lock_guard lock(mu);
          for (const auto& [name, tensor] : tensors) manifest.files[name] = tensor.dims();
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const int threads = std::min(EffectiveThreads(options.threads), std::max(count, 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  numgrid::WriteFileAtomic(out_dir / kManifestName, manifest.ToJson());
  return manifest;
}

Manifest LoadManifest(const std::filesystem::path& root) {
  const std::filesystem::path path = root / kManifestName;
  try {
    return Manifest::FromJson(numgrid::ReadFileBytes(path));
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " in " + path.string(), e.offset());
  }
}

}  // namespace attnfuse::synthworld
