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

#ifndef ATTNFUSE_NUMGRID_KERNELS_H_
#define ATTNFUSE_NUMGRID_KERNELS_H_

// Value-level tensor kernels. The differentiable wrappers in ops.h call these;
// data preparation and evaluation code uses them directly.

#include <span>
#include <vector>

#include "attnfuse/numgrid/tensor.h"

namespace attnfuse::numgrid {

// Output extents of a 2-D cross-correlation; throws ShapeError when either
// spatial extent would be < 1 or channels disagree.
Dims Conv2dOutputDims(const Dims& input, const Dims& kernel, int stride,
                      int padding);

// Cross-correlation with zero padding. kernel is [outC, inC, kH, kW]; bias has
// outC entries (or is empty for no bias).
template <typename T>
BasicTensor<T> Conv2d(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                      std::span<const T> bias, int stride, int padding);

// Accumulates gradients of Conv2d into any non-null output.
template <typename T>
void Conv2dBackward(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                    const BasicTensor<T>& out_grad, int stride, int padding,
                    BasicTensor<T>* input_grad, BasicTensor<T>* kernel_grad,
                    std::span<T> bias_grad);

template <typename T>
BasicTensor<T> AvgPool2d(const BasicTensor<T>& input, int window);
template <typename T>
void AvgPool2dBackward(const BasicTensor<T>& out_grad, int window,
                       BasicTensor<T>& input_grad);

template <typename T>
BasicTensor<T> NearestUpsample(const BasicTensor<T>& input, int factor);
template <typename T>
void NearestUpsampleBackward(const BasicTensor<T>& out_grad, int factor,
                             BasicTensor<T>& input_grad);

template <typename T>
BasicTensor<T> ConcatChannels(std::span<const BasicTensor<T>* const> parts);
template <typename T>
BasicTensor<T> SliceChannels(const BasicTensor<T>& input, int begin, int count);

// Per-pixel softmax across channels, max-subtracted.
template <typename T>
BasicTensor<T> SoftmaxChannels(const BasicTensor<T>& input);

// Per batch sample, maps [min, max] over all channels and pixels onto [0, 1].
// A constant sample maps to zeros.
template <typename T>
BasicTensor<T> MinMaxNormalize(const BasicTensor<T>& input);

// Per batch sample and channel: subtract the mean, divide by the standard
// deviation (left unscaled when the deviation is below 1e-6).
template <typename T>
BasicTensor<T> StandardizeChannels(const BasicTensor<T>& input);

// Mirrors every plane left-right.
template <typename T>
BasicTensor<T> MirrorHorizontal(const BasicTensor<T>& input);

// Sum over channels; result has one channel.
template <typename T>
BasicTensor<T> SumChannels(const BasicTensor<T>& input);

}  // namespace attnfuse::numgrid

#endif  // ATTNFUSE_NUMGRID_KERNELS_H_
