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

#include "attnfuse/attnet/data.h"

#include <algorithm>
#include <string>

#include "attnfuse/errors.h"
#include "attnfuse/numgrid/io.h"
#include "attnfuse/numgrid/kernels.h"

namespace attnfuse::attnet {
namespace {

using numgrid::Dims;
using numgrid::Tensor;

Tensor Read(const std::filesystem::path& root, const synthworld::Manifest& manifest,
            const synthworld::SampleEntry& entry, const std::string& name) {
  if (!manifest.has_file(name)) {
    throw UsageError("dataset at " + root.string() + " has no '" + name + "' maps");
  }
  const std::filesystem::path path = synthworld::SampleFile(root, entry, name);
  Tensor t = numgrid::ReadNgt(path);
  if (t.dims() != manifest.files.at(name)) {
    throw FormatError("unexpected dims " + t.dims().ToString() + " in " + path.string(), 0);
  }
  return t;
}

// Copies sample tensors of identical dims [1, C, H, W] into one batch.
Tensor Stack(std::span<const Tensor* const> parts) {
  const Dims& d = parts.front()->dims();
  Tensor out(Dims{static_cast<int>(parts.size()), d.channels, d.height, d.width});
  float* dst = out.data();
  for (const Tensor* t : parts) dst = std::copy(t->values().begin(), t->values().end(), dst);
  return out;
}

}  // namespace

Example LoadExample(const std::filesystem::path& root, const synthworld::Manifest& manifest,
                    const synthworld::SampleEntry& entry, const ModelConfig& config) {
  config.Validate();
  if (manifest.spec.num_classes != config.num_classes ||
      manifest.spec.resolution != config.map_resolution) {
    throw UsageError("dataset scene spec does not match the model config");
  }
  Example ex;
  ex.image = numgrid::StandardizeChannels(Read(root, manifest, entry, "image"));
  for (int i = 0; i < config.n_tasks(); ++i) {
    const Task task = config.tasks[i];
    const std::string name(synthworld::TaskName(task));
    ex.rasters.push_back(
        numgrid::StandardizeChannels(Read(root, manifest, entry, "pred_" + name)));
    ex.uncertainties.push_back(uncert::Normalize01(
        Read(root, manifest, entry, uncert::UncertaintyFileName(task, config.method(i)))));
  }
  ex.error = uncert::Normalize01(Read(root, manifest, entry, uncert::ErrorFileName(config.target)));
  if (config.target == Task::kSemantic) {
    ex.target_probs = Read(root, manifest, entry, "pred_semantic");
    ex.target_labels = Read(root, manifest, entry, "gt_semantic");
  }
  return ex;
}

std::vector<Example> LoadExamples(const std::filesystem::path& root,
                                  const synthworld::Manifest& manifest,
                                  const ModelConfig& config) {
  std::vector<Example> out;
  out.reserve(manifest.samples.size());
  for (const synthworld::SampleEntry& entry : manifest.samples) {
    out.push_back(LoadExample(root, manifest, entry, config));
  }
  return out;
}

Batch MakeBatch(std::span<const Example> examples, std::span<const int> indices) {
  if (indices.empty()) throw UsageError("empty batch");
  Batch b;
  std::vector<const Tensor*> parts;
  auto gather = [&](auto member) {
    parts.clear();
    for (int i : indices) parts.push_back(&member(examples[i]));
    return Stack(parts);
  };
  b.image = gather([](const Example& e) -> const Tensor& { return e.image; });
  const std::size_t n = examples[indices[0]].rasters.size();
  for (std::size_t t = 0; t < n; ++t) {
    b.rasters.push_back(gather([t](const Example& e) -> const Tensor& { return e.rasters[t]; }));
  }
  b.error = gather([](const Example& e) -> const Tensor& { return e.error; });
  const Dims& d = b.error.dims();
  b.uncertainties = Tensor(Dims{d.batch, static_cast<int>(n), d.height, d.width});
  for (int k = 0; k < d.batch; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      const auto src = examples[indices[k]].uncertainties[t].values();
      std::copy(src.begin(), src.end(), b.uncertainties.data() + b.uncertainties.offset(k, t, 0, 0));
    }
  }
  return b;
}

}  // namespace attnfuse::attnet
