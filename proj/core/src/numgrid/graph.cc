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

#include "attnfuse/numgrid/graph.h"

#include <cmath>

namespace attnfuse::numgrid {

template <typename T>
BasicVar<T> BasicGraph<T>::Push(OpKind kind, std::vector<int> inputs,
                                BasicTensor<T> value, BackwardFn backward,
                                bool requires_grad) {
  for (T v : value.values()) {
    if (!std::isfinite(v)) {
      throw std::domain_error("numgrid: non-finite value produced by op " +
                              std::to_string(static_cast<int>(kind)));
    }
  }
  Node node;
  node.kind = kind;
  node.inputs = std::move(inputs);
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  if (requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return BasicVar<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
BasicVar<T> BasicGraph<T>::Record(OpKind kind, std::vector<int> inputs,
                                  BasicTensor<T> value, BackwardFn backward) {
  bool needs = false;
  for (int id : inputs) {
    if (id < 0 || id >= static_cast<int>(nodes_.size())) {
      throw UsageError("numgrid: input node " + std::to_string(id) +
                       " does not belong to this graph");
    }
    needs = needs || nodes_[id].requires_grad;
  }
  return Push(kind, std::move(inputs), std::move(value), std::move(backward),
              needs);
}

template <typename T>
BasicTensor<T>* BasicGraph<T>::grad_sink(int id) {
  Node& node = nodes_.at(id);
  if (!node.requires_grad) return nullptr;
  if (node.grad.dims() != node.value.dims()) {
    node.grad = BasicTensor<T>(node.value.dims());
  }
  return &node.grad;
}

template <typename T>
void BasicGraph<T>::Backward(const BasicVar<T>& loss) {
  if (loss.graph() != this) throw UsageError("backward: loss from another graph");
  const int root = loss.id();
  if (nodes_.at(root).value.size() != 1) {
    throw UsageError("backward: loss must be a scalar, got dims " +
                     nodes_[root].value.dims().ToString());
  }
  for (Node& node : nodes_) node.grad = BasicTensor<T>();
  last_visits_ = 0;
  if (!nodes_[root].requires_grad) return;
  nodes_[root].grad = BasicTensor<T>(nodes_[root].value.dims(), T{1});

  for (int id = root; id >= 0; --id) {
    Node& node = nodes_[id];
    if (node.grad.empty()) continue;  // unreachable from the loss
    ++last_visits_;
    if (node.parameter != nullptr) {
      auto dst = node.parameter->mutable_grad().values();
      const auto src = node.grad.values();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    } else if (node.backward) {
      node.backward(*this, id);
    }
  }
}

template class BasicGraph<float>;
template class BasicGraph<double>;

}  // namespace attnfuse::numgrid
