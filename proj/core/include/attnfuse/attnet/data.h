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

#ifndef ATTNFUSE_ATTNET_DATA_H_
#define ATTNFUSE_ATTNET_DATA_H_

#include <filesystem>
#include <span>
#include <vector>

#include "attnfuse/attnet/model.h"
#include "attnfuse/numgrid/tensor.h"
#include "attnfuse/synthworld/dataset.h"

namespace attnfuse::attnet {

// One sample prepared for the network.
struct Example {
  numgrid::Tensor image;                       // [1, 3, R, R], standardized
  std::vector<numgrid::Tensor> rasters;        // per task, standardized
  std::vector<numgrid::Tensor> uncertainties;  // per task [1, 1, R, R] in [0, 1]
  numgrid::Tensor error;                       // target error [1, 1, R, R] in [0, 1]
  // Raw semantic probabilities and labels; present for a semantic target.
  numgrid::Tensor target_probs;
  numgrid::Tensor target_labels;
};

// Throws UsageError when the dataset lacks a file the config needs and
// IoError or FormatError when a file cannot be read.
Example LoadExample(const std::filesystem::path& root, const synthworld::Manifest& manifest,
                    const synthworld::SampleEntry& entry, const ModelConfig& config);
std::vector<Example> LoadExamples(const std::filesystem::path& root,
                                  const synthworld::Manifest& manifest,
                                  const ModelConfig& config);

struct Batch {
  numgrid::Tensor image;
  std::vector<numgrid::Tensor> rasters;
  numgrid::Tensor uncertainties;  // [B, n, R, R]
  numgrid::Tensor error;          // [B, 1, R, R]
};

Batch MakeBatch(std::span<const Example> examples, std::span<const int> indices);

}  // namespace attnfuse::attnet

#endif  // ATTNFUSE_ATTNET_DATA_H_
