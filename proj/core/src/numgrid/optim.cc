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

#include "attnfuse/numgrid/optim.h"

#include <cmath>
#include <string>

namespace attnfuse::numgrid {

template <typename T>
void AdamStep(std::span<BasicParameter<T>* const> params,
              const AdamOptions& options) {
  if (!(options.learning_rate > 0.0) || options.beta1 < 0.0 ||
      options.beta1 >= 1.0 || options.beta2 < 0.0 || options.beta2 >= 1.0 ||
      !(options.epsilon > 0.0)) {
    throw UsageError("adam: invalid hyperparameters");
  }
  for (BasicParameter<T>* p : params) {
    const std::int64_t step = p->step() + 1;
    p->set_step(step);
    const double correction1 = 1.0 - std::pow(options.beta1, static_cast<double>(step));
    const double correction2 = 1.0 - std::pow(options.beta2, static_cast<double>(step));
    auto value = p->mutable_value().values();
    const auto grad = p->grad().values();
    auto m = p->first_moment().values();
    auto v = p->second_moment().values();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      const double mi = options.beta1 * m[i] + (1.0 - options.beta1) * g;
      const double vi = options.beta2 * v[i] + (1.0 - options.beta2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double m_hat = mi / correction1;
      const double v_hat = vi / correction2;
      value[i] = static_cast<T>(value[i] - options.learning_rate * m_hat /
                                               (std::sqrt(v_hat) + options.epsilon));
    }
  }
}

template void AdamStep(std::span<BasicParameter<float>* const>, const AdamOptions&);
template void AdamStep(std::span<BasicParameter<double>* const>, const AdamOptions&);

}  // namespace attnfuse::numgrid
