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

#ifndef ATTNFUSE_ATTNET_TRAIN_H_
#define ATTNFUSE_ATTNET_TRAIN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "attnfuse/attnet/data.h"
#include "attnfuse/attnet/model.h"
#include "attnfuse/numgrid/tensor.h"

namespace attnfuse::attnet {

struct TrainOptions {
  double learning_rate = 1e-3;
  int epochs = 30;
  int batch_size = 8;
  std::uint64_t seed = 0;  // shuffling
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean per-sample training loss of each epoch
  std::int64_t steps = 0;
};

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

// Adam on the fused-estimate loss against each example's target error.
TrainResult Train(AttentionModel& model, std::span<const Example> examples,
                  const TrainOptions& options, const EpochCallback& on_epoch = nullptr);

// "epoch,mean_loss" rows.
std::string LossCurveCsv(const TrainResult& result);

// Weight maps [1, n, R, R] for one example.
numgrid::Tensor PredictWeights(AttentionModel& model, const Example& example);
// Fused estimate [1, 1, R, R] for one example.
numgrid::Tensor PredictFused(AttentionModel& model, const Example& example);

// Checkpoint: "ATFC", a little-endian u32 header length, a JSON header with
// the model config and a parameter table, then the parameters as
// concatenated NGT1 records.
void SaveModel(const AttentionModel& model, const std::filesystem::path& path);
std::string EncodeModel(const AttentionModel& model);
// Throws FormatError (with byte offset) or IoError. Never returns a
// partially loaded model.
AttentionModel LoadModel(const std::filesystem::path& path);
AttentionModel DecodeModel(std::string_view bytes);

}  // namespace attnfuse::attnet

#endif  // ATTNFUSE_ATTNET_TRAIN_H_
