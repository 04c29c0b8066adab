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

#ifndef ATTNFUSE_ATTNET_MODEL_H_
#define ATTNFUSE_ATTNET_MODEL_H_

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attnfuse/numgrid/graph.h"
#include "attnfuse/numgrid/tensor.h"
#include "attnfuse/synthworld/scene.h"
#include "attnfuse/uncert/uncert.h"

namespace attnfuse::attnet {

using synthworld::Task;

enum class WeightMode : std::uint8_t { kLinear, kSoftmax };
enum class LossKind : std::uint8_t { kMse, kL1 };

std::string_view WeightModeName(WeightMode m);
WeightMode ParseWeightMode(std::string_view name);
std::string_view LossKindName(LossKind k);
LossKind ParseLossKind(std::string_view name);

struct ModelConfig {
  std::vector<Task> tasks{Task::kSemantic};
  // One uncertainty method per entry of `tasks`. Empty means task defaults.
  std::vector<uncert::Method> methods;
  Task target = Task::kSemantic;
  int num_classes = 6;
  int patch = 1;
  int map_resolution = 64;
  int image_channels = 64;
  int pred_channels = 8;
  int hidden_channels = 64;
  WeightMode weight_mode = WeightMode::kLinear;
  LossKind loss = LossKind::kMse;

  int n_tasks() const { return static_cast<int>(tasks.size()); }
  int feature_resolution() const { return map_resolution / 2; }
  int target_index() const;
  uncert::Method method(int task_index) const;
  // Average-pool windows of the two head pooling stages.
  std::pair<int, int> pool_windows() const;
  // Throws UsageError.
  void Validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Attention network: image and per-task prediction encoders feeding a
// four-layer convolutional head that emits one weight map per task.
template <typename T>
class BasicAttentionModel {
 public:
  using Tensor = numgrid::BasicTensor<T>;
  using Var = numgrid::BasicVar<T>;
  using Graph = numgrid::BasicGraph<T>;
  using Parameter = numgrid::BasicParameter<T>;

  // Weights drawn deterministically from `seed`.
  BasicAttentionModel(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  Parameter* FindParameter(std::string_view name);

  // image [B, 3, R, R] -> [B, C_img, R/2, R/2].
  Var EncodeImage(Graph& g, Var image);
  // raster [B, C_task, R, R] -> [B, C_pred, R/2, R/2].
  Var EncodePrediction(Graph& g, int task_index, Var raster);
  // Channel concat of the image and prediction features.
  Var Features(Graph& g, Var image, std::span<const Var> rasters);
  // Weight maps before upscaling: [B, n, R/p, R/p].
  Var AttentionLogits(Graph& g, Var features);
  // Weight maps [B, n, R, R], constant on aligned p x p blocks.
  Var Forward(Graph& g, Var image, std::span<const Var> rasters);

  template <typename U>
  BasicAttentionModel<U> Cast() const;

 private:
  struct ConvLayer {
    Parameter* weight;
    Parameter* bias;
    int stride;
  };

  ConvLayer AddConv(const std::string& name, int in, int out, int stride, std::uint64_t seed,
                    double weight_std, T bias_init);
  Var ApplyConv(Graph& g, const ConvLayer& layer, Var input, bool relu);

  ModelConfig config_;
  std::deque<Parameter> params_;
  std::vector<ConvLayer> image_encoder_;
  std::vector<std::vector<ConvLayer>> pred_encoders_;
  std::vector<ConvLayer> head_;
};

using AttentionModel = BasicAttentionModel<float>;

// Sum over tasks of W_i * U_i. weights [B, n, R, R]; uncertainties is the
// channel stack [B, n, R, R].
template <typename T>
numgrid::BasicVar<T> FusedEstimate(numgrid::BasicVar<T> weights,
                                   numgrid::BasicVar<T> uncertainties);
numgrid::Tensor FusedEstimate(const numgrid::Tensor& weights,
                              std::span<const numgrid::Tensor> uncertainties);

// Mean over pixels of the squared (or absolute) difference.
template <typename T>
numgrid::BasicVar<T> Loss(numgrid::BasicVar<T> estimate, numgrid::BasicVar<T> error,
                          LossKind kind = LossKind::kMse);

}  // namespace attnfuse::attnet

#endif  // ATTNFUSE_ATTNET_MODEL_H_
