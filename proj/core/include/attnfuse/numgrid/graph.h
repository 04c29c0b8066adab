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

#ifndef ATTNFUSE_NUMGRID_GRAPH_H_
#define ATTNFUSE_NUMGRID_GRAPH_H_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "attnfuse/numgrid/tensor.h"

namespace attnfuse::numgrid {

// A learnable tensor with its accumulated gradient and Adam moments.
template <typename T>
class BasicParameter {
 public:
  BasicParameter(std::string name, BasicTensor<T> value)
      : name_(std::move(name)),
        value_(std::move(value)),
        grad_(value_.dims()),
        first_moment_(value_.dims()),
        second_moment_(value_.dims()) {}

  const std::string& name() const { return name_; }
  const BasicTensor<T>& value() const { return value_; }
  BasicTensor<T>& mutable_value() { return value_; }
  const BasicTensor<T>& grad() const { return grad_; }
  BasicTensor<T>& mutable_grad() { return grad_; }

  void ZeroGrad() { grad_.Fill(T{0}); }

  BasicTensor<T>& first_moment() { return first_moment_; }
  BasicTensor<T>& second_moment() { return second_moment_; }
  std::int64_t step() const { return step_; }
  void set_step(std::int64_t step) { step_ = step; }

 private:
  std::string name_;
  BasicTensor<T> value_;
  BasicTensor<T> grad_;
  BasicTensor<T> first_moment_;
  BasicTensor<T> second_moment_;
  std::int64_t step_ = 0;
};

using Parameter = BasicParameter<float>;

template <typename T>
class BasicGraph;

// Handle to a recorded node. Cheap to copy; valid while its graph lives.
template <typename T>
class BasicVar {
 public:
  BasicVar() = default;
  BasicVar(BasicGraph<T>* graph, int id) : graph_(graph), id_(id) {}

  BasicGraph<T>* graph() const { return graph_; }
  int id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }
  const BasicTensor<T>& value() const { return graph_->value(id_); }
  const Dims& dims() const { return value().dims(); }

 private:
  BasicGraph<T>* graph_ = nullptr;
  int id_ = -1;
};

enum class OpKind : std::uint8_t {
  kConstant,
  kParameter,
  kConv2d,
  kElementwise,
  kAvgPool2d,
  kNearestUpsample,
  kConcatChannels,
  kSoftmaxChannels,
  kMinMaxNormalize,
  kSumChannels,
  kReduceMean,
};

// Tape of recorded operations in creation order, which is a topological
// order: a node can only consume nodes recorded before it.
template <typename T>
class BasicGraph {
 public:
  // Called during the reverse sweep with the graph and the node id; must add
  // the node's output gradient contribution into its inputs' gradients.
  using BackwardFn = std::function<void(BasicGraph&, int)>;

  BasicGraph() = default;
  BasicGraph(const BasicGraph&) = delete;
  BasicGraph& operator=(const BasicGraph&) = delete;

  BasicVar<T> Constant(BasicTensor<T> value) {
    return Push(OpKind::kConstant, {}, std::move(value), nullptr, false);
  }

  // Leaf bound to `parameter`; Backward adds into parameter.mutable_grad().
  BasicVar<T> Param(BasicParameter<T>& parameter) {
    Node node;
    node.kind = OpKind::kParameter;
    node.value = parameter.value();
    node.parameter = &parameter;
    node.requires_grad = true;
    nodes_.push_back(std::move(node));
    return BasicVar<T>(this, static_cast<int>(nodes_.size()) - 1);
  }

  // Records an operation output. The node requires a gradient iff any input
  // does; otherwise `backward` is dropped.
  BasicVar<T> Record(OpKind kind, std::vector<int> inputs, BasicTensor<T> value,
                     BackwardFn backward);

  // Reverse sweep from a scalar node. Every parameter reachable from `loss`
  // receives d loss / d parameter, added to its existing gradient.
  void Backward(const BasicVar<T>& loss);

  const BasicTensor<T>& value(int id) const { return nodes_.at(id).value; }
  OpKind kind(int id) const { return nodes_.at(id).kind; }
  const std::vector<int>& inputs(int id) const { return nodes_.at(id).inputs; }
  bool requires_grad(int id) const { return nodes_.at(id).requires_grad; }

  // Gradient flowing into node `id` (output side). Valid during Backward.
  const BasicTensor<T>& grad(int id) const { return nodes_.at(id).grad; }

  // Gradient buffer of input node `id`, allocated on first use; nullptr when
  // that node does not require a gradient.
  BasicTensor<T>* grad_sink(int id);

  std::size_t size() const { return nodes_.size(); }

  // Number of nodes visited by the most recent Backward.
  std::size_t last_backward_visits() const { return last_visits_; }

 private:
  struct Node {
    OpKind kind = OpKind::kConstant;
    std::vector<int> inputs;
    BasicTensor<T> value;
    BasicTensor<T> grad;
    BasicParameter<T>* parameter = nullptr;
    bool requires_grad = false;
    BackwardFn backward;
  };

  BasicVar<T> Push(OpKind kind, std::vector<int> inputs, BasicTensor<T> value,
                   BackwardFn backward, bool requires_grad);

  std::vector<Node> nodes_;
  std::size_t last_visits_ = 0;
};

using Graph = BasicGraph<float>;
using Var = BasicVar<float>;

}  // namespace attnfuse::numgrid

#endif  // ATTNFUSE_NUMGRID_GRAPH_H_
