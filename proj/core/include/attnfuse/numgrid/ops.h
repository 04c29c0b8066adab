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

#ifndef ATTNFUSE_NUMGRID_OPS_H_
#define ATTNFUSE_NUMGRID_OPS_H_

// Differentiable operations over graph variables.

#include <cstdint>
#include <span>

#include "attnfuse/numgrid/graph.h"

namespace attnfuse::numgrid {

enum class Elementwise : std::uint8_t { kAdd, kSub, kMul, kSquare, kRelu, kAbs };

// kernel is [outC, inC, kH, kW]; bias holds outC values in any single-axis
// layout (conventionally [1, outC, 1, 1]).
template <typename T>
BasicVar<T> Conv2d(BasicVar<T> input, BasicVar<T> kernel, BasicVar<T> bias,
                   int stride, int padding);

// Binary kinds require identical dims; unary kinds ignore `b`.
// relu and abs use subgradient 0 at exactly 0.
template <typename T>
BasicVar<T> Apply(Elementwise kind, BasicVar<T> a, BasicVar<T> b = {});

template <typename T>
BasicVar<T> Add(BasicVar<T> a, BasicVar<T> b) { return Apply(Elementwise::kAdd, a, b); }
template <typename T>
BasicVar<T> Sub(BasicVar<T> a, BasicVar<T> b) { return Apply(Elementwise::kSub, a, b); }
template <typename T>
BasicVar<T> Mul(BasicVar<T> a, BasicVar<T> b) { return Apply(Elementwise::kMul, a, b); }
template <typename T>
BasicVar<T> Square(BasicVar<T> a) { return Apply(Elementwise::kSquare, a); }
template <typename T>
BasicVar<T> Relu(BasicVar<T> a) { return Apply(Elementwise::kRelu, a); }
template <typename T>
BasicVar<T> Abs(BasicVar<T> a) { return Apply(Elementwise::kAbs, a); }

template <typename T>
BasicVar<T> AvgPool2d(BasicVar<T> input, int window);

template <typename T>
BasicVar<T> NearestUpsample(BasicVar<T> input, int factor);

template <typename T>
BasicVar<T> ConcatChannels(std::span<const BasicVar<T>> parts);

template <typename T>
BasicVar<T> SoftmaxChannels(BasicVar<T> input);

// Min and max are held constant for the gradient.
template <typename T>
BasicVar<T> MinMaxNormalize(BasicVar<T> input);

template <typename T>
BasicVar<T> SumChannels(BasicVar<T> input);

// Mean of all elements as a 1x1x1x1 node.
template <typename T>
BasicVar<T> ReduceMean(BasicVar<T> input);

}  // namespace attnfuse::numgrid

#endif  // ATTNFUSE_NUMGRID_OPS_H_
