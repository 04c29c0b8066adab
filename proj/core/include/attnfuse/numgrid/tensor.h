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

#ifndef ATTNFUSE_NUMGRID_TENSOR_H_
#define ATTNFUSE_NUMGRID_TENSOR_H_

#include <algorithm>
#include <cstddef>
#include <new>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attnfuse/errors.h"

namespace attnfuse::numgrid {

// Extents of a rank-4 tensor laid out as [batch, channel, height, width].
struct Dims {
  int batch = 0;
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t count() const {
    return static_cast<std::size_t>(batch) * channels * height * width;
  }
  std::size_t plane() const {
    return static_cast<std::size_t>(height) * width;
  }
  bool valid() const {
    return batch >= 0 && channels >= 0 && height >= 0 && width >= 0;
  }
  std::string ToString() const {
    return "[" + std::to_string(batch) + "," + std::to_string(channels) + "," +
           std::to_string(height) + "," + std::to_string(width) + "]";
  }

  friend bool operator==(const Dims&, const Dims&) = default;
};

// Cache-line aligned storage. Vectorized reductions split their work by
// address alignment, so a fixed alignment keeps results reproducible.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}  // NOLINT

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlignment));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, kAlignment); }

  template <typename U>
  friend bool operator==(const AlignedAllocator&, const AlignedAllocator<U>&) {
    return true;
  }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

// Dense, contiguous, row-major rank-4 array. Value type; copies are deep.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;

  explicit BasicTensor(Dims dims, T fill = T{0}) : dims_(dims) {
    if (!dims.valid()) throw ShapeError("negative extent in " + dims.ToString());
    values_.assign(dims.count(), fill);
  }

  BasicTensor(Dims dims, const std::vector<T>& values)
      : dims_(dims), values_(values.begin(), values.end()) {
    if (!dims.valid() || values_.size() != dims.count()) {
      throw ShapeError("tensor of dims " + dims.ToString() + " given " +
                       std::to_string(values_.size()) + " values");
    }
  }

  static BasicTensor Scalar(T value) {
    return BasicTensor(Dims{1, 1, 1, 1}, std::vector<T>{value});
  }

  const Dims& dims() const { return dims_; }
  int batch() const { return dims_.batch; }
  int channels() const { return dims_.channels; }
  int height() const { return dims_.height; }
  int width() const { return dims_.width; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  std::size_t offset(int n, int c, int h, int w) const {
    return ((static_cast<std::size_t>(n) * dims_.channels + c) * dims_.height +
            h) *
               dims_.width +
           w;
  }

  T& operator()(int n, int c, int h, int w) { return values_[offset(n, c, h, w)]; }
  const T& operator()(int n, int c, int h, int w) const {
    return values_[offset(n, c, h, w)];
  }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  // One [height, width] plane of sample n, channel c.
  std::span<T> plane(int n, int c) {
    return std::span<T>(values_).subspan(offset(n, c, 0, 0), dims_.plane());
  }
  std::span<const T> plane(int n, int c) const {
    return std::span<const T>(values_).subspan(offset(n, c, 0, 0),
                                               dims_.plane());
  }

  // All channels of sample n.
  std::span<const T> sample(int n) const {
    const std::size_t per = dims_.count() / std::max(dims_.batch, 1);
    return std::span<const T>(values_).subspan(per * n, per);
  }

  void Fill(T value) { std::fill(values_.begin(), values_.end(), value); }

  template <typename U>
  BasicTensor<U> Cast() const {
    BasicTensor<U> out(dims_);
    std::copy(values_.begin(), values_.end(), out.data());
    return out;
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  Dims dims_;
  AlignedVector<T> values_;
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

}  // namespace attnfuse::numgrid

#endif  // ATTNFUSE_NUMGRID_TENSOR_H_
