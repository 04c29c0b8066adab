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

#include "attnfuse/attnet/model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "attnfuse/errors.h"
#include "attnfuse/numgrid/kernels.h"
#include "attnfuse/numgrid/ops.h"

namespace attnfuse::attnet {
namespace {

using numgrid::Dims;

constexpr int kKernel = 3;
constexpr int kPad = 1;
constexpr double kHeadOutputScale = 0.1;

bool IsPowerOfTwo(int v) { return v > 0 && (v & (v - 1)) == 0; }

int Log2(int v) {
  int k = 0;
  while ((1 << k) < v) ++k;
  return k;
}

}  // namespace

std::string_view WeightModeName(WeightMode m) {
  return m == WeightMode::kLinear ? "linear" : "softmax";
}

WeightMode ParseWeightMode(std::string_view name) {
  if (name == "linear") return WeightMode::kLinear;
  if (name == "softmax") return WeightMode::kSoftmax;
  throw UsageError("unknown weight mode '" + std::string(name) + "'");
}

std::string_view LossKindName(LossKind k) { return k == LossKind::kMse ? "mse" : "l1"; }

LossKind ParseLossKind(std::string_view name) {
  if (name == "mse") return LossKind::kMse;
  if (name == "l1") return LossKind::kL1;
  throw UsageError("unknown loss '" + std::string(name) + "'");
}

int ModelConfig::target_index() const {
  const auto it = std::find(tasks.begin(), tasks.end(), target);
  if (it == tasks.end()) throw UsageError("target task is not among the model tasks");
  return static_cast<int>(it - tasks.begin());
}

uncert::Method ModelConfig::method(int task_index) const {
  if (task_index < 0 || task_index >= n_tasks()) throw UsageError("task index out of range");
  return methods.empty() ? uncert::DefaultMethod(tasks[task_index]) : methods[task_index];
}

std::pair<int, int> ModelConfig::pool_windows() const {
  if (patch == 1) return {1, 1};
  const int k = Log2(patch) - 1;  // total pooling is p / 2 over the half-resolution features
  return {1 << ((k + 1) / 2), 1 << (k / 2)};
}

void ModelConfig::Validate() const {
  if (tasks.empty()) throw UsageError("model: at least one task is required");
  if (std::set<Task>(tasks.begin(), tasks.end()).size() != tasks.size()) {
    throw UsageError("model: duplicate task");
  }
  if (target == Task::kInstance) throw UsageError("model: instance cannot be the target");
  target_index();
  if (!methods.empty()) {
    if (methods.size() != tasks.size()) {
      throw UsageError("model: one uncertainty method per task is required");
    }
    for (int i = 0; i < n_tasks(); ++i) {
      const auto ok = uncert::MethodsFor(tasks[i]);
      if (std::find(ok.begin(), ok.end(), methods[i]) == ok.end()) {
        throw UsageError("model: method " + std::string(uncert::MethodName(methods[i])) +
                         " does not apply to " + std::string(synthworld::TaskName(tasks[i])));
      }
    }
  }
  if (num_classes < 2) throw UsageError("model: num_classes must be >= 2");
  if (map_resolution < 2 || map_resolution % 2 != 0) {
    throw UsageError("model: map resolution must be even");
  }
  if (!IsPowerOfTwo(patch) || patch > map_resolution || map_resolution % patch != 0) {
    throw UsageError("model: patch must be a power of two dividing the map resolution");
  }
  if (image_channels < 4 || image_channels % 4 != 0) {
    throw UsageError("model: image channels must be a positive multiple of 4");
  }
  if (pred_channels < 1 || hidden_channels < 1) throw UsageError("model: channels must be >= 1");
}

template <typename T>
BasicAttentionModel<T>::BasicAttentionModel(const ModelConfig& config, std::uint64_t seed)
    : config_(config) {
  config_.Validate();
  if (config_.methods.empty()) {
    for (Task t : config_.tasks) config_.methods.push_back(uncert::DefaultMethod(t));
  }
  std::uint64_t layer = 0;
  auto he = [](int fan_in) { return std::sqrt(2.0 / (fan_in * kKernel * kKernel)); };
  auto next_seed = [&] { return synthworld::MixSeed(seed, layer++); };

  const int c = config_.image_channels;
  const int widths[] = {3, c / 4, c / 2, c};
  for (int i = 0; i < 3; ++i) {
    image_encoder_.push_back(AddConv("image.conv" + std::to_string(i + 1), widths[i],
                                     widths[i + 1], i == 1 ? 2 : 1, next_seed(),
                                     he(widths[i]), T{0}));
  }
  const int cp = config_.pred_channels;
  for (int t = 0; t < config_.n_tasks(); ++t) {
    const int in = synthworld::TaskChannels(config_.tasks[t], config_.num_classes);
    const std::string prefix = "pred" + std::to_string(t) + ".conv";
    std::vector<ConvLayer> enc;
    enc.push_back(AddConv(prefix + "1", in, cp, 1, next_seed(), he(in), T{0}));
    enc.push_back(AddConv(prefix + "2", cp, cp, 2, next_seed(), he(cp), T{0}));
    enc.push_back(AddConv(prefix + "3", cp, cp, 1, next_seed(), he(cp), T{0}));
    pred_encoders_.push_back(std::move(enc));
  }
  const int h = config_.hidden_channels;
  const int n = config_.n_tasks();
  const int cat = c + n * cp;
  head_.push_back(AddConv("head.conv1", cat, h, 1, next_seed(), he(cat), T{0}));
  head_.push_back(AddConv("head.conv2", h, h, 1, next_seed(), he(h), T{0}));
  head_.push_back(AddConv("head.conv3", h, h, 1, next_seed(), he(h), T{0}));
  const T out_bias = config_.weight_mode == WeightMode::kLinear ? T(1) / T(n) : T{0};
  head_.push_back(AddConv("head.conv4", 2 * h, n, 1, next_seed(),
                          kHeadOutputScale * he(2 * h), out_bias));
}

template <typename T>
typename BasicAttentionModel<T>::ConvLayer BasicAttentionModel<T>::AddConv(
    const std::string& name, int in, int out, int stride, std::uint64_t seed,
    double weight_std, T bias_init) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, weight_std);
  Tensor w(Dims{out, in, kKernel, kKernel});
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<T>(dist(rng));
  params_.emplace_back(name + ".weight", std::move(w));
  Parameter* weight = &params_.back();
  params_.emplace_back(name + ".bias", Tensor(Dims{1, out, 1, 1}, bias_init));
  return {weight, &params_.back(), stride};
}

template <typename T>
std::vector<typename BasicAttentionModel<T>::Parameter*> BasicAttentionModel<T>::parameters() {
  std::vector<Parameter*> out;
  for (Parameter& p : params_) out.push_back(&p);
  return out;
}

template <typename T>
std::vector<const typename BasicAttentionModel<T>::Parameter*>
BasicAttentionModel<T>::parameters() const {
  std::vector<const Parameter*> out;
  for (const Parameter& p : params_) out.push_back(&p);
  return out;
}

template <typename T>
typename BasicAttentionModel<T>::Parameter* BasicAttentionModel<T>::FindParameter(
    std::string_view name) {
  for (Parameter& p : params_) {
    if (p.name() == name) return &p;
  }
  return nullptr;
}

template <typename T>
typename BasicAttentionModel<T>::Var BasicAttentionModel<T>::ApplyConv(Graph& g,
                                                                       const ConvLayer& layer,
                                                                       Var input, bool relu) {
  Var out = numgrid::Conv2d(input, g.Param(*layer.weight), g.Param(*layer.bias), layer.stride,
                            kPad);
  return relu ? numgrid::Relu(out) : out;
}

template <typename T>
typename BasicAttentionModel<T>::Var BasicAttentionModel<T>::EncodeImage(Graph& g, Var image) {
  const Dims& d = image.dims();
  if (d.channels != 3 || d.height != config_.map_resolution ||
      d.width != config_.map_resolution) {
    throw ShapeError("encode_image: expected [B, 3, " + std::to_string(config_.map_resolution) +
                     ", " + std::to_string(config_.map_resolution) + "], got " + d.ToString());
  }
  Var x = image;
  for (const ConvLayer& layer : image_encoder_) x = ApplyConv(g, layer, x, true);
  return x;
}

template <typename T>
typename BasicAttentionModel<T>::Var BasicAttentionModel<T>::EncodePrediction(Graph& g,
                                                                              int task_index,
                                                                              Var raster) {
  if (task_index < 0 || task_index >= config_.n_tasks()) {
    throw UsageError("encode_prediction: unknown task index " + std::to_string(task_index));
  }
  const Dims& d = raster.dims();
  const int want = synthworld::TaskChannels(config_.tasks[task_index], config_.num_classes);
  if (d.channels != want || d.height != config_.map_resolution ||
      d.width != config_.map_resolution) {
    throw ShapeError("encode_prediction: unexpected raster " + d.ToString());
  }
  Var x = raster;
  for (const ConvLayer& layer : pred_encoders_[task_index]) x = ApplyConv(g, layer, x, true);
  return x;
}

template <typename T>
typename BasicAttentionModel<T>::Var BasicAttentionModel<T>::Features(Graph& g, Var image,
                                                                      std::span<const Var> rasters) {
  if (static_cast<int>(rasters.size()) != config_.n_tasks()) {
    throw UsageError("forward: expected " + std::to_string(config_.n_tasks()) +
                     " prediction rasters, got " + std::to_string(rasters.size()));
  }
  std::vector<Var> parts{EncodeImage(g, image)};
  for (int t = 0; t < config_.n_tasks(); ++t) parts.push_back(EncodePrediction(g, t, rasters[t]));
  return numgrid::ConcatChannels<T>(parts);
}

template <typename T>
typename BasicAttentionModel<T>::Var BasicAttentionModel<T>::AttentionLogits(Graph& g,
                                                                             Var features) {
  const auto [first, second] = config_.pool_windows();
  Var x = ApplyConv(g, head_[0], features, true);
  Var a = ApplyConv(g, head_[1], x, true);
  if (first > 1) a = numgrid::AvgPool2d(a, first);
  Var b = ApplyConv(g, head_[2], a, true);
  if (second > 1) {
    b = numgrid::AvgPool2d(b, second);
    a = numgrid::AvgPool2d(a, second);
  }
  const Var both[] = {a, b};
  Var cat = numgrid::ConcatChannels<T>(both);
  if (config_.patch == 1) cat = numgrid::NearestUpsample(cat, 2);
  Var logits = ApplyConv(g, head_[3], cat, false);
  if (config_.weight_mode == WeightMode::kSoftmax) logits = numgrid::SoftmaxChannels(logits);
  return logits;
}

template <typename T>
typename BasicAttentionModel<T>::Var BasicAttentionModel<T>::Forward(Graph& g, Var image,
                                                                     std::span<const Var> rasters) {
  Var w = AttentionLogits(g, Features(g, image, rasters));
  return config_.patch > 1 ? numgrid::NearestUpsample(w, config_.patch) : w;
}

template <typename T>
template <typename U>
BasicAttentionModel<U> BasicAttentionModel<T>::Cast() const {
  BasicAttentionModel<U> out(config_, 0);
  auto dst = out.parameters();
  std::size_t i = 0;
  for (const Parameter& p : params_) dst[i++]->mutable_value() = p.value().template Cast<U>();
  return out;
}

template <typename T>
numgrid::BasicVar<T> FusedEstimate(numgrid::BasicVar<T> weights,
                                   numgrid::BasicVar<T> uncertainties) {
  if (weights.dims() != uncertainties.dims()) {
    throw ShapeError("fused estimate: weights " + weights.dims().ToString() +
                     " vs uncertainties " + uncertainties.dims().ToString());
  }
  return numgrid::SumChannels(numgrid::Mul(weights, uncertainties));
}

numgrid::Tensor FusedEstimate(const numgrid::Tensor& weights,
                              std::span<const numgrid::Tensor> uncertainties) {
  const Dims& d = weights.dims();
  if (static_cast<int>(uncertainties.size()) != d.channels) {
    throw ShapeError("fused estimate: " + std::to_string(d.channels) + " weight maps but " +
                     std::to_string(uncertainties.size()) + " uncertainty maps");
  }
  numgrid::Tensor out(Dims{d.batch, 1, d.height, d.width});
  for (int i = 0; i < d.channels; ++i) {
    if (uncertainties[i].dims() != out.dims()) {
      throw ShapeError("fused estimate: uncertainty map " + uncertainties[i].dims().ToString() +
                       " vs " + out.dims().ToString());
    }
  }
  for (int n = 0; n < d.batch; ++n) {
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        float s = 0;
        for (int i = 0; i < d.channels; ++i) s += weights(n, i, y, x) * uncertainties[i](n, 0, y, x);
        out(n, 0, y, x) = s;
      }
    }
  }
  return out;
}

template <typename T>
numgrid::BasicVar<T> Loss(numgrid::BasicVar<T> estimate, numgrid::BasicVar<T> error,
                          LossKind kind) {
  if (estimate.dims() != error.dims()) {
    throw ShapeError("loss: " + estimate.dims().ToString() + " vs " + error.dims().ToString());
  }
  numgrid::BasicVar<T> diff = numgrid::Sub(estimate, error);
  return numgrid::ReduceMean(kind == LossKind::kMse ? numgrid::Square(diff) : numgrid::Abs(diff));
}

template class BasicAttentionModel<float>;
template class BasicAttentionModel<double>;
template BasicAttentionModel<double> BasicAttentionModel<float>::Cast<double>() const;
template BasicAttentionModel<float> BasicAttentionModel<double>::Cast<float>() const;
template BasicAttentionModel<float> BasicAttentionModel<float>::Cast<float>() const;
template numgrid::BasicVar<float> FusedEstimate(numgrid::BasicVar<float>, numgrid::BasicVar<float>);
template numgrid::BasicVar<double> FusedEstimate(numgrid::BasicVar<double>,
                                                 numgrid::BasicVar<double>);
template numgrid::BasicVar<float> Loss(numgrid::BasicVar<float>, numgrid::BasicVar<float>, LossKind);
template numgrid::BasicVar<double> Loss(numgrid::BasicVar<double>, numgrid::BasicVar<double>,
                                        LossKind);

}  // namespace attnfuse::attnet
