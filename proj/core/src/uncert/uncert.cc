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

#include "attnfuse/uncert/uncert.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "attnfuse/errors.h"
#include "attnfuse/numgrid/kernels.h"

namespace attnfuse::uncert {
namespace {

using numgrid::Dims;

Dims MapDims(const Dims& d) { return Dims{d.batch, 1, d.height, d.width}; }

void RequireClasses(const Tensor& probs) {
  if (probs.channels() < 2) throw UsageError("probability map needs at least 2 classes");
}

int ArgMax(const Tensor& t, int n, int y, int x) {
  int best = 0;
  for (int c = 1; c < t.channels(); ++c) {
    if (t(n, c, y, x) > t(n, best, y, x)) best = c;
  }
  return best;
}

}  // namespace

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kSoftmaxEntropy: return "softmax_entropy";
    case Method::kSoftmaxDistance: return "softmax_distance";
    case Method::kEnsemble: return "ensemble";
    case Method::kFlip: return "flip";
    case Method::kRoi: return "roi";
  }
  return "unknown";
}

Method ParseMethod(std::string_view name) {
  for (Method m : {Method::kSoftmaxEntropy, Method::kSoftmaxDistance, Method::kEnsemble,
                   Method::kFlip, Method::kRoi}) {
    if (MethodName(m) == name) return m;
  }
  throw UsageError("unknown uncertainty method '" + std::string(name) + "'");
}

std::vector<Method> MethodsFor(Task task) {
  switch (task) {
    case Task::kSemantic:
      return {Method::kSoftmaxEntropy, Method::kSoftmaxDistance, Method::kEnsemble,
              Method::kFlip};
    case Task::kDepth: return {Method::kEnsemble, Method::kFlip};
    case Task::kNormal: return {Method::kFlip, Method::kEnsemble};
    case Task::kInstance: return {Method::kRoi};
  }
  return {};
}

Method DefaultMethod(Task task) { return MethodsFor(task).front(); }

ErrorKind ErrorKindFor(Task task) {
  switch (task) {
    case Task::kSemantic: return ErrorKind::kCrossEntropy;
    case Task::kDepth: return ErrorKind::kL2;
    case Task::kNormal: return ErrorKind::kAngular;
    case Task::kInstance: break;
  }
  throw UsageError("the instance task has no error map");
}

Tensor SoftmaxEntropy(const Tensor& probs) {
  RequireClasses(probs);
  Tensor out(MapDims(probs.dims()));
  for (int n = 0; n < probs.batch(); ++n) {
    for (int y = 0; y < probs.height(); ++y) {
      for (int x = 0; x < probs.width(); ++x) {
        double h = 0;
        for (int c = 0; c < probs.channels(); ++c) {
          const double p = probs(n, c, y, x);
          h -= p * std::log(std::max(p, kProbClamp));
        }
        out(n, 0, y, x) = static_cast<float>(std::max(h, 0.0));
      }
    }
  }
  return out;
}

Tensor SoftmaxDistance(const Tensor& probs) {
  RequireClasses(probs);
  Tensor out(MapDims(probs.dims()));
  for (int n = 0; n < probs.batch(); ++n) {
    for (int y = 0; y < probs.height(); ++y) {
      for (int x = 0; x < probs.width(); ++x) {
        float first = -1, second = -1;
        for (int c = 0; c < probs.channels(); ++c) {
          const float p = probs(n, c, y, x);
          if (p > first) {
            second = first;
            first = p;
          } else if (p > second) {
            second = p;
          }
        }
        out(n, 0, y, x) = 1.0f - (first - second);
      }
    }
  }
  return out;
}

Tensor EnsembleUncertainty(const Tensor& ensemble, EnsembleKind kind) {
  const int m = ensemble.batch();
  if (m < 2) throw UsageError("ensemble uncertainty needs at least 2 members");
  const int h = ensemble.height(), w = ensemble.width(), ch = ensemble.channels();
  Tensor out(Dims{1, 1, h, w});
  std::vector<int> votes(kind == EnsembleKind::kClassification ? ch : 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (kind == EnsembleKind::kClassification) {
        std::fill(votes.begin(), votes.end(), 0);
        for (int i = 0; i < m; ++i) ++votes[ArgMax(ensemble, i, y, x)];
        const int modal = *std::max_element(votes.begin(), votes.end());
        out(0, 0, y, x) = static_cast<float>(1.0 - static_cast<double>(modal) / m);
        continue;
      }
      double total = 0;
      for (int c = 0; c < ch; ++c) {
        double mean = 0;
        for (int i = 0; i < m; ++i) mean += ensemble(i, c, y, x);
        mean /= m;
        double var = 0;
        for (int i = 0; i < m; ++i) {
          const double d = ensemble(i, c, y, x) - mean;
          var += d * d;
        }
        total += std::sqrt(var / m);
      }
      out(0, 0, y, x) = static_cast<float>(total / ch);
    }
  }
  return out;
}

Tensor FlipUncertainty(const Tensor& pred, const Tensor& flipped_back) {
  if (pred.dims() != flipped_back.dims()) {
    throw ShapeError("flip uncertainty: " + pred.dims().ToString() + " vs " +
                     flipped_back.dims().ToString());
  }
  Tensor out(MapDims(pred.dims()));
  for (int n = 0; n < pred.batch(); ++n) {
    for (int y = 0; y < pred.height(); ++y) {
      for (int x = 0; x < pred.width(); ++x) {
        double s = 0;
        for (int c = 0; c < pred.channels(); ++c) {
          s += std::abs(static_cast<double>(pred(n, c, y, x)) - flipped_back(n, c, y, x));
        }
        out(n, 0, y, x) = static_cast<float>(s / pred.channels());
      }
    }
  }
  return out;
}

Tensor RoiUncertainty(const Tensor& instance_pred) {
  if (instance_pred.channels() != 2) {
    throw ShapeError("roi uncertainty expects id and confidence channels, got " +
                     instance_pred.dims().ToString());
  }
  Tensor out(MapDims(instance_pred.dims()));
  for (int n = 0; n < instance_pred.batch(); ++n) {
    for (int y = 0; y < instance_pred.height(); ++y) {
      for (int x = 0; x < instance_pred.width(); ++x) {
        const bool background = instance_pred(n, 0, y, x) == 0.0f;
        out(n, 0, y, x) = background ? 0.5f : 1.0f - instance_pred(n, 1, y, x);
      }
    }
  }
  return out;
}

Tensor ErrorMap(ErrorKind kind, const Tensor& pred, const Tensor& gt) {
  const Dims& d = pred.dims();
  Tensor out(MapDims(d));
  if (kind == ErrorKind::kCrossEntropy) {
    if (gt.dims() != MapDims(d)) {
      throw ShapeError("cross entropy: labels " + gt.dims().ToString() + " vs probs " +
                       d.ToString());
    }
    for (int n = 0; n < d.batch; ++n) {
      for (int y = 0; y < d.height; ++y) {
        for (int x = 0; x < d.width; ++x) {
          const float label = gt(n, 0, y, x);
          const int k = static_cast<int>(label);
          if (label < 0 || k >= d.channels || static_cast<float>(k) != label) {
            throw UsageError("cross entropy: label " + std::to_string(label) +
                             " outside [0, " + std::to_string(d.channels) + ")");
          }
          const double p = std::max<double>(pred(n, k, y, x), kProbClamp);
          out(n, 0, y, x) = static_cast<float>(-std::log(p));
        }
      }
    }
    return out;
  }
  if (gt.dims() != d) {
    throw ShapeError("error map: " + d.ToString() + " vs " + gt.dims().ToString());
  }
  for (int n = 0; n < d.batch; ++n) {
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        if (kind == ErrorKind::kL2) {
          double s = 0;
          for (int c = 0; c < d.channels; ++c) {
            const double r = static_cast<double>(pred(n, c, y, x)) - gt(n, c, y, x);
            s += r * r;
          }
          out(n, 0, y, x) = static_cast<float>(std::sqrt(s));
          continue;
        }
        double dot = 0, len = 0;
        for (int c = 0; c < d.channels; ++c) {
          dot += static_cast<double>(pred(n, c, y, x)) * gt(n, c, y, x);
          len += static_cast<double>(pred(n, c, y, x)) * pred(n, c, y, x);
        }
        const double cosine = len > 0 ? dot / std::sqrt(len) : 0.0;
        out(n, 0, y, x) = static_cast<float>(std::max(0.0, 1.0 - cosine));
      }
    }
  }
  return out;
}

Tensor Normalize01(const Tensor& map) { return numgrid::MinMaxNormalize(map); }

Tensor ComputeUncertainty(Task task, Method method, const synthworld::TaskOutput& output) {
  const auto methods = MethodsFor(task);
  if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
    throw UsageError("method " + std::string(MethodName(method)) + " does not apply to task " +
                     std::string(synthworld::TaskName(task)));
  }
  if (!output.present()) {
    throw UsageError("no predictions for task " + std::string(synthworld::TaskName(task)));
  }
  switch (method) {
    case Method::kSoftmaxEntropy: return SoftmaxEntropy(output.main);
    case Method::kSoftmaxDistance: return SoftmaxDistance(output.main);
    case Method::kEnsemble:
      return EnsembleUncertainty(output.ensemble, task == Task::kSemantic
                                                      ? EnsembleKind::kClassification
                                                      : EnsembleKind::kRegression);
    case Method::kFlip: return FlipUncertainty(output.main, output.flipped);
    case Method::kRoi: return RoiUncertainty(output.main);
  }
  throw UsageError("unknown method");
}

std::string UncertaintyFileName(Task task, Method method) {
  return "unc_" + std::string(synthworld::TaskName(task)) + "_" + std::string(MethodName(method));
}

std::string ErrorFileName(Task task) {
  return "err_" + std::string(synthworld::TaskName(task));
}

synthworld::DerivedMaps StandardDerivedMaps() {
  return [](const synthworld::Scene& scene, const synthworld::TaskPredictions& preds) {
    std::vector<std::pair<std::string, Tensor>> out;
    for (Task task : synthworld::kAllTasks) {
      const synthworld::TaskOutput& o = preds.at(task);
      if (!o.present()) continue;
      for (Method m : MethodsFor(task)) {
        out.emplace_back(UncertaintyFileName(task, m), ComputeUncertainty(task, m, o));
      }
    }
    out.emplace_back(ErrorFileName(Task::kSemantic),
                     ErrorMap(ErrorKind::kCrossEntropy, preds.at(Task::kSemantic).main,
                              scene.semantic));
    out.emplace_back(ErrorFileName(Task::kDepth),
                     ErrorMap(ErrorKind::kL2, preds.at(Task::kDepth).main, scene.depth));
    out.emplace_back(ErrorFileName(Task::kNormal),
                     ErrorMap(ErrorKind::kAngular, preds.at(Task::kNormal).main, scene.normal));
    return out;
  };
}

}  // namespace attnfuse::uncert
