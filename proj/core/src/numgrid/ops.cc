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

#include "attnfuse/numgrid/ops.h"

#include <algorithm>
#include <string>
#include <vector>

#include "attnfuse/numgrid/kernels.h"

namespace attnfuse::numgrid {
namespace {

template <typename T>
BasicGraph<T>& GraphOf(std::initializer_list<BasicVar<T>> vars) {
  BasicGraph<T>* graph = nullptr;
  for (const BasicVar<T>& v : vars) {
    if (!v.valid()) throw UsageError("numgrid: unbound variable");
    if (graph != nullptr && v.graph() != graph) {
      throw UsageError("numgrid: variables from different graphs");
    }
    graph = v.graph();
  }
  return *graph;
}

template <typename T>
void AddInto(BasicTensor<T>* sink, const BasicTensor<T>& grad) {
  if (sink == nullptr) return;
  auto dst = sink->values();
  const auto src = grad.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

template <typename T>
BasicVar<T> Conv2d(BasicVar<T> input, BasicVar<T> kernel, BasicVar<T> bias,
                   int stride, int padding) {
  BasicGraph<T>& g = GraphOf({input, kernel, bias});
  BasicTensor<T> out = numgrid::Conv2d<T>(input.value(), kernel.value(),
                                          bias.value().values(), stride, padding);
  return g.Record(
      OpKind::kConv2d, {input.id(), kernel.id(), bias.id()}, std::move(out),
      [stride, padding](BasicGraph<T>& graph, int self) {
        const auto& in = graph.inputs(self);
        BasicTensor<T>* bias_sink = graph.grad_sink(in[2]);
        Conv2dBackward<T>(graph.value(in[0]), graph.value(in[1]),
                          graph.grad(self), stride, padding,
                          graph.grad_sink(in[0]), graph.grad_sink(in[1]),
                          bias_sink ? bias_sink->values() : std::span<T>());
      });
}

template <typename T>
BasicVar<T> Apply(Elementwise kind, BasicVar<T> a, BasicVar<T> b) {
  const bool binary = kind == Elementwise::kAdd || kind == Elementwise::kSub ||
                      kind == Elementwise::kMul;
  BasicGraph<T>& g = binary ? GraphOf({a, b}) : GraphOf({a});
  if (binary && a.dims() != b.dims()) {
    throw ShapeError("elementwise: dims " + a.dims().ToString() + " and " +
                     b.dims().ToString() + " differ");
  }
  const auto x = a.value().values();
  BasicTensor<T> out(a.dims());
  auto y = out.values();
  switch (kind) {
    case Elementwise::kAdd: {
      const auto z = b.value().values();
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + z[i];
      break;
    }
    case Elementwise::kSub: {
      const auto z = b.value().values();
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - z[i];
      break;
    }
    case Elementwise::kMul: {
      const auto z = b.value().values();
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] * z[i];
      break;
    }
    case Elementwise::kSquare:
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] * x[i];
      break;
    case Elementwise::kRelu:
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] > T{0} ? x[i] : T{0};
      break;
    case Elementwise::kAbs:
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] < T{0} ? -x[i] : x[i];
      break;
  }
  std::vector<int> inputs{a.id()};
  if (binary) inputs.push_back(b.id());
  return g.Record(
      OpKind::kElementwise, std::move(inputs), std::move(out),
      [kind](BasicGraph<T>& graph, int self) {
        const auto& in = graph.inputs(self);
        const auto dy = graph.grad(self).values();
        const auto x = graph.value(in[0]).values();
        BasicTensor<T>* da = graph.grad_sink(in[0]);
        BasicTensor<T>* db = in.size() > 1 ? graph.grad_sink(in[1]) : nullptr;
        switch (kind) {
          case Elementwise::kAdd:
            AddInto(da, graph.grad(self));
            AddInto(db, graph.grad(self));
            break;
          case Elementwise::kSub:
            AddInto(da, graph.grad(self));
            if (db != nullptr) {
              auto d = db->values();
              for (std::size_t i = 0; i < d.size(); ++i) d[i] -= dy[i];
            }
            break;
          case Elementwise::kMul: {
            const auto z = graph.value(in[1]).values();
            if (da != nullptr) {
              auto d = da->values();
              for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i] * z[i];
            }
            if (db != nullptr) {
              auto d = db->values();
              for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i] * x[i];
            }
            break;
          }
          case Elementwise::kSquare:
            if (da != nullptr) {
              auto d = da->values();
              for (std::size_t i = 0; i < d.size(); ++i) d[i] += T{2} * x[i] * dy[i];
            }
            break;
          case Elementwise::kRelu:
            if (da != nullptr) {
              auto d = da->values();
              for (std::size_t i = 0; i < d.size(); ++i) {
                if (x[i] > T{0}) d[i] += dy[i];
              }
            }
            break;
          case Elementwise::kAbs:
            if (da != nullptr) {
              auto d = da->values();
              for (std::size_t i = 0; i < d.size(); ++i) {
                if (x[i] > T{0}) d[i] += dy[i];
                else if (x[i] < T{0}) d[i] -= dy[i];
              }
            }
            break;
        }
      });
}

template <typename T>
BasicVar<T> AvgPool2d(BasicVar<T> input, int window) {
  BasicGraph<T>& g = GraphOf({input});
  return g.Record(OpKind::kAvgPool2d, {input.id()},
                  numgrid::AvgPool2d<T>(input.value(), window),
                  [window](BasicGraph<T>& graph, int self) {
                    BasicTensor<T>* sink = graph.grad_sink(graph.inputs(self)[0]);
                    if (sink != nullptr) {
                      AvgPool2dBackward<T>(graph.grad(self), window, *sink);
                    }
                  });
}

template <typename T>
BasicVar<T> NearestUpsample(BasicVar<T> input, int factor) {
  BasicGraph<T>& g = GraphOf({input});
  return g.Record(OpKind::kNearestUpsample, {input.id()},
                  numgrid::NearestUpsample<T>(input.value(), factor),
                  [factor](BasicGraph<T>& graph, int self) {
                    BasicTensor<T>* sink = graph.grad_sink(graph.inputs(self)[0]);
                    if (sink != nullptr) {
                      NearestUpsampleBackward<T>(graph.grad(self), factor, *sink);
                    }
                  });
}

template <typename T>
BasicVar<T> ConcatChannels(std::span<const BasicVar<T>> parts) {
  if (parts.empty()) throw ShapeError("concat_channels: no parts");
  BasicGraph<T>& g = GraphOf({parts.front()});
  std::vector<const BasicTensor<T>*> values;
  std::vector<int> inputs;
  for (const BasicVar<T>& part : parts) {
    if (part.graph() != &g) throw UsageError("numgrid: variables from different graphs");
    values.push_back(&part.value());
    inputs.push_back(part.id());
  }
  BasicTensor<T> out = numgrid::ConcatChannels<T>(
      std::span<const BasicTensor<T>* const>(values));
  return g.Record(
      OpKind::kConcatChannels, std::move(inputs), std::move(out),
      [](BasicGraph<T>& graph, int self) {
        const BasicTensor<T>& dy = graph.grad(self);
        int begin = 0;
        for (int id : graph.inputs(self)) {
          const int count = graph.value(id).channels();
          if (BasicTensor<T>* sink = graph.grad_sink(id)) {
            AddInto(sink, SliceChannels<T>(dy, begin, count));
          }
          begin += count;
        }
      });
}

template <typename T>
BasicVar<T> SoftmaxChannels(BasicVar<T> input) {
  BasicGraph<T>& g = GraphOf({input});
  return g.Record(
      OpKind::kSoftmaxChannels, {input.id()},
      numgrid::SoftmaxChannels<T>(input.value()),
      [](BasicGraph<T>& graph, int self) {
        BasicTensor<T>* sink = graph.grad_sink(graph.inputs(self)[0]);
        if (sink == nullptr) return;
        const BasicTensor<T>& y = graph.value(self);
        const BasicTensor<T>& dy = graph.grad(self);
        const Dims& d = y.dims();
        const std::size_t plane = d.plane();
        for (int n = 0; n < d.batch; ++n) {
          const std::size_t base = y.offset(n, 0, 0, 0);
          for (std::size_t p = 0; p < plane; ++p) {
            T dot{0};
            for (int c = 0; c < d.channels; ++c) {
              const std::size_t i = base + c * plane + p;
              dot += y[i] * dy[i];
            }
            for (int c = 0; c < d.channels; ++c) {
              const std::size_t i = base + c * plane + p;
              (*sink)[i] += y[i] * (dy[i] - dot);
            }
          }
        }
      });
}

template <typename T>
BasicVar<T> MinMaxNormalize(BasicVar<T> input) {
  BasicGraph<T>& g = GraphOf({input});
  return g.Record(
      OpKind::kMinMaxNormalize, {input.id()},
      numgrid::MinMaxNormalize<T>(input.value()),
      [](BasicGraph<T>& graph, int self) {
        const int src = graph.inputs(self)[0];
        BasicTensor<T>* sink = graph.grad_sink(src);
        if (sink == nullptr) return;
        const BasicTensor<T>& x = graph.value(src);
        const BasicTensor<T>& dy = graph.grad(self);
        for (int n = 0; n < x.batch(); ++n) {
          const auto sample = x.sample(n);
          if (sample.empty()) continue;
          const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
          const T range = *hi - *lo;
          if (!(range > T{0})) continue;
          const std::size_t base = x.offset(n, 0, 0, 0);
          for (std::size_t i = 0; i < sample.size(); ++i) {
            (*sink)[base + i] += dy[base + i] / range;
          }
        }
      });
}

template <typename T>
BasicVar<T> SumChannels(BasicVar<T> input) {
  BasicGraph<T>& g = GraphOf({input});
  return g.Record(OpKind::kSumChannels, {input.id()},
                  numgrid::SumChannels<T>(input.value()),
                  [](BasicGraph<T>& graph, int self) {
                    BasicTensor<T>* sink = graph.grad_sink(graph.inputs(self)[0]);
                    if (sink == nullptr) return;
                    const BasicTensor<T>& dy = graph.grad(self);
                    for (int n = 0; n < sink->batch(); ++n) {
                      const auto src = dy.plane(n, 0);
                      for (int c = 0; c < sink->channels(); ++c) {
                        auto dst = sink->plane(n, c);
                        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
                      }
                    }
                  });
}

template <typename T>
BasicVar<T> ReduceMean(BasicVar<T> input) {
  BasicGraph<T>& g = GraphOf({input});
  const auto x = input.value().values();
  if (x.empty()) throw ShapeError("reduce_mean: empty tensor");
  // Accumulated in double.
  double total = 0.0;
  for (T v : x) total += v;
  const T mean = static_cast<T>(total / static_cast<double>(x.size()));
  return g.Record(OpKind::kReduceMean, {input.id()},
                  BasicTensor<T>::Scalar(mean),
                  [](BasicGraph<T>& graph, int self) {
                    BasicTensor<T>* sink = graph.grad_sink(graph.inputs(self)[0]);
                    if (sink == nullptr) return;
                    const T share = graph.grad(self)[0] /
                                    static_cast<T>(sink->size());
                    for (T& v : sink->values()) v += share;
                  });
}

#define ATTNFUSE_INSTANTIATE_OPS(T)                                              \
  template BasicVar<T> Conv2d(BasicVar<T>, BasicVar<T>, BasicVar<T>, int, int);  \
  template BasicVar<T> Apply(Elementwise, BasicVar<T>, BasicVar<T>);             \
  template BasicVar<T> AvgPool2d(BasicVar<T>, int);                              \
  template BasicVar<T> NearestUpsample(BasicVar<T>, int);                        \
  template BasicVar<T> ConcatChannels(std::span<const BasicVar<T>>);             \
  template BasicVar<T> SoftmaxChannels(BasicVar<T>);                             \
  template BasicVar<T> MinMaxNormalize(BasicVar<T>);                             \
  template BasicVar<T> SumChannels(BasicVar<T>);                                 \
  template BasicVar<T> ReduceMean(BasicVar<T>);

ATTNFUSE_INSTANTIATE_OPS(float)
ATTNFUSE_INSTANTIATE_OPS(double)

#undef ATTNFUSE_INSTANTIATE_OPS

}  // namespace attnfuse::numgrid
