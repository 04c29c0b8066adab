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

#include "attnfuse/attnet/train.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "attnfuse/errors.h"
#include "attnfuse/numgrid/ops.h"
#include "attnfuse/numgrid/optim.h"

namespace attnfuse::attnet {

namespace {

using numgrid::Graph;
using numgrid::Tensor;
using numgrid::Var;

Var ForwardBatch(AttentionModel& model, Graph& g, const Batch& batch) {
  std::vector<Var> rasters;
  for (const Tensor& r : batch.rasters) rasters.push_back(g.Constant(r));
  return model.Forward(g, g.Constant(batch.image), rasters);
}

}  // namespace

TrainResult Train(AttentionModel& model, std::span<const Example> examples,
                  const TrainOptions& options, const EpochCallback& on_epoch) {
  if (options.epochs < 0) throw UsageError("train: epochs must be >= 0");
  if (options.batch_size < 1) throw UsageError("train: batch size must be >= 1");
  if (!(options.learning_rate > 0)) throw UsageError("train: learning rate must be > 0");
  if (examples.empty() && options.epochs > 0) throw UsageError("train: no training examples");
  const ModelConfig& config = model.config();
  for (const Example& e : examples) {
    if (static_cast<int>(e.rasters.size()) != config.n_tasks()) {
      throw UsageError("train: examples were loaded for a different task list");
    }
  }

  TrainResult result;
  auto params = model.parameters();
  numgrid::AdamOptions adam;
  adam.learning_rate = options.learning_rate;
  std::vector<int> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::mt19937_64 rng(synthworld::MixSeed(options.seed, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      const std::span<const int> idx(order.data() + start, end - start);
      const Batch batch = MakeBatch(examples, idx);
      Graph g;
      const Var weights = ForwardBatch(model, g, batch);
      const Var fused = FusedEstimate(weights, g.Constant(batch.uncertainties));
      const Var loss = Loss(fused, g.Constant(batch.error), config.loss);
      numgrid::ZeroGrad<float>(params);
      g.Backward(loss);
      numgrid::AdamStep<float>(params, adam);
      total += static_cast<double>(loss.value()[0]) * static_cast<double>(idx.size());
      ++result.steps;
    }
    result.epoch_loss.push_back(total / static_cast<double>(order.size()));
    if (on_epoch) on_epoch(epoch, result.epoch_loss.back());
  }
  return result;
}

std::string LossCurveCsv(const TrainResult& result) {
  std::string out = "epoch,mean_loss\n";
  char line[64];
  for (std::size_t i = 0; i < result.epoch_loss.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.9g\n", i, result.epoch_loss[i]);
    out += line;
  }
  return out;
}

Tensor PredictWeights(AttentionModel& model, const Example& example) {
  const int index = 0;
  const Batch batch = MakeBatch(std::span<const Example>(&example, 1), std::span<const int>(&index, 1));
  Graph g;
  return ForwardBatch(model, g, batch).value();
}

Tensor PredictFused(AttentionModel& model, const Example& example) {
  return FusedEstimate(PredictWeights(model, example), example.uncertainties);
}

}  // namespace attnfuse::attnet
