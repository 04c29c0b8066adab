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

#include "attnfuse/numgrid/kernels.h"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace attnfuse::numgrid {
namespace {

template <typename T>
using RowMatrix =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Output columns [lo, hi) whose input column ox * stride - padding + k lies
// inside [0, width).
inline void ValidColumns(int width, int k, int stride, int padding, int out_w,
                         int& lo, int& hi) {
  const int shift = padding - k;
  lo = shift > 0 ? (shift + stride - 1) / stride : 0;
  hi = (width - 1 + shift) >= 0 ? (width - 1 + shift) / stride + 1 : 0;
  lo = std::min(lo, out_w);
  hi = std::clamp(hi, lo, out_w);
}

// Unfolds one sample into a [inC*kH*kW, outH*outW] patch matrix.
template <typename T>
void Im2Col(const T* image, int channels, int height, int width, int kh,
            int kw, int stride, int padding, int out_h, int out_w, T* col) {
  const int out_plane = out_h * out_w;
  for (int c = 0; c < channels; ++c) {
    const T* src = image + static_cast<std::size_t>(c) * height * width;
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx) {
        T* dst = col + (static_cast<std::size_t>(c * kh + ky) * kw + kx) *
                           out_plane;
        int lo, hi;
        ValidColumns(width, kx, stride, padding, out_w, lo, hi);
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - padding + ky;
          T* row = dst + oy * out_w;
          if (iy < 0 || iy >= height) {
            std::fill(row, row + out_w, T{0});
            continue;
          }
          const T* src_row = src + static_cast<std::size_t>(iy) * width - padding + kx;
          std::fill(row, row + lo, T{0});
          if (stride == 1) {
            std::copy(src_row + lo, src_row + hi, row + lo);
          } else {
            for (int ox = lo; ox < hi; ++ox) row[ox] = src_row[ox * stride];
          }
          std::fill(row + hi, row + out_w, T{0});
        }
      }
    }
  }
}

template <typename T>
void Col2Im(const T* col, int channels, int height, int width, int kh, int kw,
            int stride, int padding, int out_h, int out_w, T* image) {
  const int out_plane = out_h * out_w;
  for (int c = 0; c < channels; ++c) {
    T* dst = image + static_cast<std::size_t>(c) * height * width;
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx) {
        const T* src = col + (static_cast<std::size_t>(c * kh + ky) * kw + kx) *
                                 out_plane;
        int lo, hi;
        ValidColumns(width, kx, stride, padding, out_w, lo, hi);
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - padding + ky;
          if (iy < 0 || iy >= height) continue;
          const T* row = src + oy * out_w;
          T* dst_row = dst + static_cast<std::size_t>(iy) * width - padding + kx;
          for (int ox = lo; ox < hi; ++ox) dst_row[ox * stride] += row[ox];
        }
      }
    }
  }
}

// Few output channels make im2col wasteful. For stride-1 convolutions that
// preserve the extent, each kernel tap is one shifted multiply-add over the
// flattened plane; columns that would wrap across rows are read from a copy
// of the input with those columns zeroed.
constexpr int kDirectMaxOutChannels = 8;

template <typename T>
using FlatArray = Eigen::Array<T, Eigen::Dynamic, 1>;

// Copies of one channel plane, one per horizontal tap offset.
template <typename T>
class ShiftedPlanes {
 public:
  ShiftedPlanes(int height, int width, int padding)
      : width_(width), padding_(padding), plane_(height * width),
        buffer_(static_cast<std::size_t>(2 * padding + 1) * plane_) {}

  void Load(const T* channel) {
    for (int dx = -padding_; dx <= padding_; ++dx) {
      T* v = buffer_.data() + static_cast<std::size_t>(dx + padding_) * plane_;
      std::copy(channel, channel + plane_, v);
      if (dx == 0) continue;
      // dx < 0 zeroes the last -dx columns, dx > 0 the first dx columns.
      const int first = dx < 0 ? width_ + dx : 0;
      const int last = dx < 0 ? width_ : dx;
      for (int row = 0; row < plane_; row += width_) {
        std::fill(v + row + first, v + row + last, T{0});
      }
    }
  }

  // Source pointer and valid output range [lo, hi) for tap (ky, kx).
  const T* Tap(int ky, int kx, int& lo, int& hi) const {
    const int dx = kx - padding_;
    const int shift = (ky - padding_) * width_ + dx;
    lo = std::max(0, -shift);
    hi = std::min(plane_, plane_ - shift);
    return buffer_.data() + static_cast<std::size_t>(dx + padding_) * plane_ + shift;
  }

 private:
  int width_, padding_, plane_;
  AlignedVector<T> buffer_;
};

bool IsSame(const Dims& kernel, int stride, int padding) {
  return stride == 1 && kernel.height == kernel.width &&
         2 * padding == kernel.height - 1 && padding > 0;
}

template <typename T>
void DirectConvForward(const T* image, const BasicTensor<T>& kernel, int height,
                       int width, int padding, T* out) {
  const int plane = height * width;
  ShiftedPlanes<T> planes(height, width, padding);
  for (int c = 0; c < kernel.channels(); ++c) {
    planes.Load(image + static_cast<std::size_t>(c) * plane);
    for (int ky = 0; ky < kernel.height(); ++ky) {
      for (int kx = 0; kx < kernel.width(); ++kx) {
        int lo, hi;
        const T* src = planes.Tap(ky, kx, lo, hi);
        if (hi <= lo) continue;
        const Eigen::Map<const FlatArray<T>> tap(src + lo, hi - lo);
        for (int o = 0; o < kernel.batch(); ++o) {
          Eigen::Map<FlatArray<T>>(out + static_cast<std::size_t>(o) * plane + lo, hi - lo) +=
              kernel(o, c, ky, kx) * tap;
        }
      }
    }
  }
}

template <typename T>
void DirectConvKernelGrad(const T* image, const T* grad, int in_c, int height,
                          int width, int padding, BasicTensor<T>& kernel_grad) {
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  const int plane = height * width;
  ShiftedPlanes<T> planes(height, width, padding);
  for (int c = 0; c < in_c; ++c) {
    planes.Load(image + static_cast<std::size_t>(c) * plane);
    for (int ky = 0; ky < kernel_grad.height(); ++ky) {
      for (int kx = 0; kx < kernel_grad.width(); ++kx) {
        int lo, hi;
        const T* src = planes.Tap(ky, kx, lo, hi);
        if (hi <= lo) continue;
        const Eigen::Map<const Vec> tap(src + lo, hi - lo);
        for (int o = 0; o < kernel_grad.batch(); ++o) {
          kernel_grad(o, c, ky, kx) +=
              Eigen::Map<const Vec>(grad + static_cast<std::size_t>(o) * plane + lo, hi - lo)
                  .dot(tap);
        }
      }
    }
  }
}

bool IsPointwise(const Dims& kernel, int stride, int padding) {
  return kernel.height == 1 && kernel.width == 1 && stride == 1 &&
         padding == 0;
}

void RequireSameBatchAndSpace(const Dims& a, const Dims& b, const char* op) {
  if (a.batch != b.batch || a.height != b.height || a.width != b.width) {
    throw ShapeError(std::string(op) + ": extents " + a.ToString() + " and " +
                     b.ToString() + " disagree");
  }
}

}  // namespace

Dims Conv2dOutputDims(const Dims& input, const Dims& kernel, int stride,
                      int padding) {
  if (stride < 1) throw ShapeError("conv2d: stride must be positive");
  if (padding < 0) throw ShapeError("conv2d: padding must be non-negative");
  if (input.channels != kernel.channels) {
    throw ShapeError("conv2d: input " + input.ToString() +
                     " does not match kernel " + kernel.ToString());
  }
  const int span_h = input.height + 2 * padding - kernel.height;
  const int span_w = input.width + 2 * padding - kernel.width;
  if (span_h < 0 || span_w < 0 || kernel.height < 1 || kernel.width < 1) {
    throw ShapeError("conv2d: non-positive output extent for input " +
                     input.ToString() + " and kernel " + kernel.ToString());
  }
  return Dims{input.batch, kernel.batch, span_h / stride + 1,
              span_w / stride + 1};
}

template <typename T>
BasicTensor<T> Conv2d(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                      std::span<const T> bias, int stride, int padding) {
  const Dims out_dims =
      Conv2dOutputDims(input.dims(), kernel.dims(), stride, padding);
  if (!bias.empty() && static_cast<int>(bias.size()) != out_dims.channels) {
    throw ShapeError("conv2d: bias has " + std::to_string(bias.size()) +
                     " entries, expected " + std::to_string(out_dims.channels));
  }
  BasicTensor<T> out(out_dims);
  const Dims& in = input.dims();
  const int kh = kernel.height(), kw = kernel.width();
  const int patch = in.channels * kh * kw;
  const int out_plane = out_dims.height * out_dims.width;
  const bool pointwise = IsPointwise(kernel.dims(), stride, padding);
  const bool direct = IsSame(kernel.dims(), stride, padding) &&
                      out_dims.channels <= kDirectMaxOutChannels;

  Eigen::Map<const RowMatrix<T>> weights(kernel.data(), out_dims.channels,
                                         patch);
  AlignedVector<T> col(pointwise || direct
                         ? 0
                         : static_cast<std::size_t>(patch) * out_plane);
  for (int n = 0; n < in.batch; ++n) {
    const T* image = input.data() + input.offset(n, 0, 0, 0);
    if (direct) {
      T* dst = out.data() + out.offset(n, 0, 0, 0);
      DirectConvForward(image, kernel, in.height, in.width, padding, dst);
      if (!bias.empty()) {
        for (int c = 0; c < out_dims.channels; ++c) {
          T* plane = dst + static_cast<std::size_t>(c) * out_plane;
          for (int i = 0; i < out_plane; ++i) plane[i] += bias[c];
        }
      }
      continue;
    }
    if (!pointwise) {
      Im2Col(image, in.channels, in.height, in.width, kh, kw, stride, padding,
             out_dims.height, out_dims.width, col.data());
    }
    Eigen::Map<const RowMatrix<T>> patches(pointwise ? image : col.data(),
                                           patch, out_plane);
    Eigen::Map<RowMatrix<T>> result(out.data() + out.offset(n, 0, 0, 0),
                                    out_dims.channels, out_plane);
    result.noalias() = weights * patches;
    if (!bias.empty()) {
      for (int c = 0; c < out_dims.channels; ++c) {
        result.row(c).array() += bias[c];
      }
    }
  }
  return out;
}

template <typename T>
void Conv2dBackward(const BasicTensor<T>& input, const BasicTensor<T>& kernel,
                    const BasicTensor<T>& out_grad, int stride, int padding,
                    BasicTensor<T>* input_grad, BasicTensor<T>* kernel_grad,
                    std::span<T> bias_grad) {
  const Dims out_dims =
      Conv2dOutputDims(input.dims(), kernel.dims(), stride, padding);
  if (out_grad.dims() != out_dims) {
    throw ShapeError("conv2d backward: gradient dims " +
                     out_grad.dims().ToString() + ", expected " +
                     out_dims.ToString());
  }
  const Dims& in = input.dims();
  const int kh = kernel.height(), kw = kernel.width();
  const int patch = in.channels * kh * kw;
  const int out_plane = out_dims.height * out_dims.width;
  const bool pointwise = IsPointwise(kernel.dims(), stride, padding);
  const bool direct = IsSame(kernel.dims(), stride, padding) &&
                      out_dims.channels <= kDirectMaxOutChannels;

  Eigen::Map<const RowMatrix<T>> weights(kernel.data(), out_dims.channels,
                                         patch);
  AlignedVector<T> col(pointwise || direct
                         ? 0
                         : static_cast<std::size_t>(patch) * out_plane);
  RowMatrix<T> col_grad;
  // Stride-1 convolutions preserving the extent take the cheaper transposed
  // path for the input gradient.
  const bool same = !pointwise && stride == 1 && kh == kw &&
                    2 * padding == kh - 1 && input_grad != nullptr;
  const int in_plane = in.height * in.width;
  const int flipped_patch = out_dims.channels * kh * kw;
  RowMatrix<T> flipped;
  AlignedVector<T> grad_col;
  if (same) {
    flipped.resize(in.channels, flipped_patch);
    for (int o = 0; o < out_dims.channels; ++o) {
      for (int c = 0; c < in.channels; ++c) {
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            flipped(c, (o * kh + ky) * kw + kx) =
                kernel(o, c, kh - 1 - ky, kw - 1 - kx);
          }
        }
      }
    }
    grad_col.resize(static_cast<std::size_t>(flipped_patch) * in_plane);
  }
  for (int n = 0; n < in.batch; ++n) {
    Eigen::Map<const RowMatrix<T>> grad(
        out_grad.data() + out_grad.offset(n, 0, 0, 0), out_dims.channels,
        out_plane);
    if (!bias_grad.empty()) {
      for (int c = 0; c < out_dims.channels; ++c) bias_grad[c] += grad.row(c).sum();
    }
    const T* image = input.data() + input.offset(n, 0, 0, 0);
    if (kernel_grad != nullptr && direct) {
      DirectConvKernelGrad(image, out_grad.data() + out_grad.offset(n, 0, 0, 0),
                           in.channels, in.height, in.width, padding, *kernel_grad);
    } else if (kernel_grad != nullptr) {
      if (!pointwise) {
        Im2Col(image, in.channels, in.height, in.width, kh, kw, stride,
               padding, out_dims.height, out_dims.width, col.data());
      }
      Eigen::Map<const RowMatrix<T>> patches(pointwise ? image : col.data(),
                                             patch, out_plane);
      Eigen::Map<RowMatrix<T>> kgrad(kernel_grad->data(), out_dims.channels,
                                     patch);
      kgrad.noalias() += grad * patches.transpose();
    }
    if (input_grad != nullptr) {
      T* dst = input_grad->data() + input_grad->offset(n, 0, 0, 0);
      if (pointwise) {
        Eigen::Map<RowMatrix<T>> igrad(dst, patch, out_plane);
        igrad.noalias() += weights.transpose() * grad;
      } else if (same) {
        // Correlate the output gradient with the flipped, transposed kernel.
        Im2Col(out_grad.data() + out_grad.offset(n, 0, 0, 0), out_dims.channels,
               out_dims.height, out_dims.width, kh, kw, 1, kh - 1 - padding,
               in.height, in.width, grad_col.data());
        Eigen::Map<const RowMatrix<T>> gpatches(grad_col.data(), flipped_patch,
                                                in_plane);
        Eigen::Map<RowMatrix<T>> igrad(dst, in.channels, in_plane);
        igrad.noalias() += flipped * gpatches;
      } else {
        col_grad.noalias() = weights.transpose() * grad;
        Col2Im(col_grad.data(), in.channels, in.height, in.width, kh, kw,
               stride, padding, out_dims.height, out_dims.width, dst);
      }
    }
  }
}

template <typename T>
BasicTensor<T> AvgPool2d(const BasicTensor<T>& input, int window) {
  const Dims& in = input.dims();
  if (window < 1 || in.height % window != 0 || in.width % window != 0) {
    throw ShapeError("avg_pool2d: window " + std::to_string(window) +
                     " does not divide " + in.ToString());
  }
  if (window == 1) return input;
  BasicTensor<T> out(
      Dims{in.batch, in.channels, in.height / window, in.width / window});
  // Double accumulation keeps the block mean of a replicated block exact.
  const double count = static_cast<double>(window * window);
  for (int n = 0; n < in.batch; ++n) {
    for (int c = 0; c < in.channels; ++c) {
      for (int oy = 0; oy < out.height(); ++oy) {
        for (int ox = 0; ox < out.width(); ++ox) {
          double sum = 0.0;
          for (int dy = 0; dy < window; ++dy) {
            for (int dx = 0; dx < window; ++dx) {
              sum += input(n, c, oy * window + dy, ox * window + dx);
            }
          }
          out(n, c, oy, ox) = static_cast<T>(sum / count);
        }
      }
    }
  }
  return out;
}

template <typename T>
void AvgPool2dBackward(const BasicTensor<T>& out_grad, int window,
                       BasicTensor<T>& input_grad) {
  const T scale = T{1} / static_cast<T>(window * window);
  const Dims& g = out_grad.dims();
  for (int n = 0; n < g.batch; ++n) {
    for (int c = 0; c < g.channels; ++c) {
      for (int oy = 0; oy < g.height; ++oy) {
        for (int ox = 0; ox < g.width; ++ox) {
          const T v = out_grad(n, c, oy, ox) * scale;
          for (int dy = 0; dy < window; ++dy) {
            for (int dx = 0; dx < window; ++dx) {
              input_grad(n, c, oy * window + dy, ox * window + dx) += v;
            }
          }
        }
      }
    }
  }
}

template <typename T>
BasicTensor<T> NearestUpsample(const BasicTensor<T>& input, int factor) {
  if (factor < 1) throw ShapeError("nearest_upsample: factor must be >= 1");
  if (factor == 1) return input;
  const Dims& in = input.dims();
  BasicTensor<T> out(
      Dims{in.batch, in.channels, in.height * factor, in.width * factor});
  for (int n = 0; n < in.batch; ++n) {
    for (int c = 0; c < in.channels; ++c) {
      for (int y = 0; y < out.height(); ++y) {
        const T* src = input.data() + input.offset(n, c, y / factor, 0);
        T* dst = out.data() + out.offset(n, c, y, 0);
        for (int x = 0; x < out.width(); ++x) dst[x] = src[x / factor];
      }
    }
  }
  return out;
}

template <typename T>
void NearestUpsampleBackward(const BasicTensor<T>& out_grad, int factor,
                             BasicTensor<T>& input_grad) {
  const Dims& g = out_grad.dims();
  for (int n = 0; n < g.batch; ++n) {
    for (int c = 0; c < g.channels; ++c) {
      for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
          input_grad(n, c, y / factor, x / factor) += out_grad(n, c, y, x);
        }
      }
    }
  }
}

template <typename T>
BasicTensor<T> ConcatChannels(std::span<const BasicTensor<T>* const> parts) {
  if (parts.empty()) throw ShapeError("concat_channels: no parts");
  const Dims& first = parts.front()->dims();
  int channels = 0;
  for (const BasicTensor<T>* part : parts) {
    RequireSameBatchAndSpace(first, part->dims(), "concat_channels");
    channels += part->channels();
  }
  BasicTensor<T> out(Dims{first.batch, channels, first.height, first.width});
  for (int n = 0; n < first.batch; ++n) {
    T* dst = out.data() + out.offset(n, 0, 0, 0);
    for (const BasicTensor<T>* part : parts) {
      const auto src = part->sample(n);
      dst = std::copy(src.begin(), src.end(), dst);
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> SliceChannels(const BasicTensor<T>& input, int begin,
                             int count) {
  if (begin < 0 || count < 0 || begin + count > input.channels()) {
    throw ShapeError("slice_channels: range [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") outside " +
                     input.dims().ToString());
  }
  const Dims& in = input.dims();
  BasicTensor<T> out(Dims{in.batch, count, in.height, in.width});
  for (int n = 0; n < in.batch; ++n) {
    const T* src = input.data() + input.offset(n, begin, 0, 0);
    std::copy(src, src + count * in.plane(), out.data() + out.offset(n, 0, 0, 0));
  }
  return out;
}

template <typename T>
BasicTensor<T> SoftmaxChannels(const BasicTensor<T>& input) {
  const Dims& in = input.dims();
  BasicTensor<T> out(in);
  const std::size_t plane = in.plane();
  for (int n = 0; n < in.batch; ++n) {
    const T* src = input.data() + input.offset(n, 0, 0, 0);
    T* dst = out.data() + out.offset(n, 0, 0, 0);
    for (std::size_t p = 0; p < plane; ++p) {
      T peak = -std::numeric_limits<T>::infinity();
      for (int c = 0; c < in.channels; ++c) peak = std::max(peak, src[c * plane + p]);
      T total{0};
      for (int c = 0; c < in.channels; ++c) {
        const T e = std::exp(src[c * plane + p] - peak);
        dst[c * plane + p] = e;
        total += e;
      }
      for (int c = 0; c < in.channels; ++c) dst[c * plane + p] /= total;
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> MinMaxNormalize(const BasicTensor<T>& input) {
  BasicTensor<T> out(input.dims());
  for (int n = 0; n < input.batch(); ++n) {
    const auto src = input.sample(n);
    if (src.empty()) continue;
    const auto [lo, hi] = std::minmax_element(src.begin(), src.end());
    const T low = *lo, range = *hi - *lo;
    T* dst = out.data() + out.offset(n, 0, 0, 0);
    if (!(range > T{0})) continue;  // constant sample stays zero
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = std::clamp((src[i] - low) / range, T{0}, T{1});
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> StandardizeChannels(const BasicTensor<T>& input) {
  BasicTensor<T> out(input.dims());
  for (int n = 0; n < input.batch(); ++n) {
    for (int c = 0; c < input.channels(); ++c) {
      const auto src = input.plane(n, c);
      auto dst = out.plane(n, c);
      double mean = 0.0;
      for (T v : src) mean += v;
      mean /= static_cast<double>(src.size());
      double var = 0.0;
      for (T v : src) var += (v - mean) * (v - mean);
      const double sd = std::sqrt(var / static_cast<double>(src.size()));
      const double scale = sd < 1e-6 ? 1.0 : 1.0 / sd;
      for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<T>((src[i] - mean) * scale);
      }
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> MirrorHorizontal(const BasicTensor<T>& input) {
  BasicTensor<T> out(input.dims());
  const Dims& d = input.dims();
  for (int n = 0; n < d.batch; ++n) {
    for (int c = 0; c < d.channels; ++c) {
      for (int y = 0; y < d.height; ++y) {
        const T* src = input.data() + input.offset(n, c, y, 0);
        T* dst = out.data() + out.offset(n, c, y, 0);
        std::reverse_copy(src, src + d.width, dst);
      }
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> SumChannels(const BasicTensor<T>& input) {
  const Dims& d = input.dims();
  BasicTensor<T> out(Dims{d.batch, 1, d.height, d.width});
  for (int n = 0; n < d.batch; ++n) {
    auto dst = out.plane(n, 0);
    for (int c = 0; c < d.channels; ++c) {
      const auto src = input.plane(n, c);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
    }
  }
  return out;
}

#define ATTNFUSE_INSTANTIATE_KERNELS(T)                                        \
  template BasicTensor<T> Conv2d(const BasicTensor<T>&, const BasicTensor<T>&, \
                                 std::span<const T>, int, int);                \
  template void Conv2dBackward(const BasicTensor<T>&, const BasicTensor<T>&,   \
                               const BasicTensor<T>&, int, int,                \
                               BasicTensor<T>*, BasicTensor<T>*, std::span<T>); \
  template BasicTensor<T> AvgPool2d(const BasicTensor<T>&, int);               \
  template void AvgPool2dBackward(const BasicTensor<T>&, int,                  \
                                  BasicTensor<T>&);                            \
  template BasicTensor<T> NearestUpsample(const BasicTensor<T>&, int);         \
  template void NearestUpsampleBackward(const BasicTensor<T>&, int,            \
                                        BasicTensor<T>&);                      \
  template BasicTensor<T> ConcatChannels(                                      \
      std::span<const BasicTensor<T>* const>);                                 \
  template BasicTensor<T> SliceChannels(const BasicTensor<T>&, int, int);      \
  template BasicTensor<T> SoftmaxChannels(const BasicTensor<T>&);              \
  template BasicTensor<T> MinMaxNormalize(const BasicTensor<T>&);              \
  template BasicTensor<T> StandardizeChannels(const BasicTensor<T>&);          \
  template BasicTensor<T> MirrorHorizontal(const BasicTensor<T>&);             \
  template BasicTensor<T> SumChannels(const BasicTensor<T>&);

ATTNFUSE_INSTANTIATE_KERNELS(float)
ATTNFUSE_INSTANTIATE_KERNELS(double)

#undef ATTNFUSE_INSTANTIATE_KERNELS

}  // namespace attnfuse::numgrid
