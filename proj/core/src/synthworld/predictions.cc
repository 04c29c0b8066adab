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

#include "attnfuse/synthworld/predictions.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "attnfuse/numgrid/kernels.h"
#include "src/synthworld/unit_hash.h"

namespace attnfuse::synthworld {
namespace {

using numgrid::Dims;
using numgrid::Tensor;
using Vec3 = std::array<double, 3>;

constexpr std::uint64_t kInstanceStream = 0x1257a9ce;
constexpr std::uint64_t kImageStream = 0x11647e;
constexpr double kTinyNoise = 0.002;
constexpr double kFogDensity = 0.25;
constexpr float kNightGain = 0.3f;
constexpr float kNightNoise = 0.03f;
constexpr int kCleanTile = 8;
constexpr double kProbJitter = 0.01;

double Lerp(double lo, double hi, double u) { return lo + (hi - lo) * u; }

Vec3 Normalize(Vec3 v) {
  const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (len < 1e-12) return {0, 0, 1};
  return {v[0] / len, v[1] / len, v[2] / len};
}

Vec3 Cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double Dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Rodrigues rotation of v about unit axis k.
Vec3 Rotate(const Vec3& v, const Vec3& k, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  const Vec3 kxv = Cross(k, v);
  const double kv = Dot(k, v);
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = v[i] * c + kxv[i] * s + k[i] * kv * (1 - c);
  return out;
}

// Everything a single simulation pass needs to know about its frame.
struct Frame {
  const Scene* scene;
  const RuleAssignment* assign;
  const CorruptionProfile* profile;
  std::uint64_t seed;
  int pass;  // 0 main, 1..M ensemble members, M + 1 flipped
};

class UnitAttributes {
 public:
  UnitAttributes(const Frame& f, Task task, int rule, std::uint64_t unit)
      : seed_(f.seed),
        task_(static_cast<std::uint64_t>(task)),
        rule_(static_cast<std::uint64_t>(rule)),
        unit_(unit),
        pass_(static_cast<std::uint64_t>(f.pass)) {}

  // Slots read with per_pass = false are shared by every pass.

  double Uniform(std::uint64_t slot, bool per_pass = false) const {
    return internal::HashUniform({seed_, task_, rule_, unit_, per_pass ? pass_ : 0, slot});
  }

  double Gaussian(std::uint64_t slot) const {
    const double u1 = std::max(Uniform(slot, true), 1e-300);
    const double u2 = Uniform(slot + 1, true);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t seed_, task_, rule_, unit_, pass_;
};

bool Overconfident(const Frame& f, Task task, int rule) {
  for (const FailureEffect& e : f.profile->rules[rule].effects) {
    if (e.task == task) return e.confidence == Confidence::kOverconfident;
  }
  return false;
}

std::mt19937_64 PassRng(const Frame& f, Task task) {
  return std::mt19937_64(
      internal::HashKeys({f.seed, static_cast<std::uint64_t>(task),
                          static_cast<std::uint64_t>(f.pass), 0x9a55}));
}

bool IsBoundary(const Tensor& labels, int y, int x) {
  const int r = labels.height();
  const float l = labels(0, 0, y, x);
  return (y > 0 && labels(0, 0, y - 1, x) != l) || (y + 1 < r && labels(0, 0, y + 1, x) != l) ||
         (x > 0 && labels(0, 0, y, x - 1) != l) || (x + 1 < r && labels(0, 0, y, x + 1) != l);
}

// Picks the class that is `offset` steps past gt among the K - 1 wrong ones.
int WrongClass(int gt, int k, double u, int avoid = -1) {
  const int choices = k - 1 - (avoid >= 0 && avoid != gt ? 1 : 0);
  if (choices <= 0) return (gt + 1) % k;
  int step = std::min(static_cast<int>(u * choices), choices - 1);
  for (int c = (gt + 1) % k;; c = (c + 1) % k) {
    if (c == gt || c == avoid) continue;
    if (step-- == 0) return c;
  }
}

// Writes probabilities with `top` on class a, `second` on class b and the
// remainder spread with random weights over the other classes.
void WriteProbs(Tensor& out, int y, int x, int a, double top, int b, double second,
                std::mt19937_64& rng) {
  const int k = out.channels();
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(k, 0.0);
  double rest = 1.0 - top - (b >= 0 ? second : 0.0);
  double wsum = 0;
  std::vector<double> w(k, 0.0);
  for (int c = 0; c < k; ++c) {
    if (c == a || c == b) continue;
    w[c] = u(rng);
    wsum += w[c];
  }
  if (wsum == 0) {
    // Only a and b exist: give them the remainder proportionally.
    if (b >= 0) second += rest; else top += rest;
    rest = 0;
  }
  for (int c = 0; c < k; ++c) p[c] = wsum > 0 ? rest * w[c] / wsum : 0.0;
  p[a] += top;
  if (b >= 0) p[b] += second;
  for (int c = 0; c < k; ++c) out(0, c, y, x) = static_cast<float>(p[c]);
}

void Perturb(Tensor& out, const Tensor& base, int y, int x, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 10 * kTinyNoise);
  const int k = out.channels();
  std::vector<double> p(k);
  double sum = 0;
  for (int c = 0; c < k; ++c) {
    p[c] = base(0, c, y, x) * std::exp(n(rng));
    sum += p[c];
  }
  for (int c = 0; c < k; ++c) out(0, c, y, x) = static_cast<float>(p[c] / sum);
}

// Unit key for pixels no rule claims: the instance, or an 8 px ground tile.
std::uint64_t CleanUnit(const Scene& s, int y, int x) {
  const int id = static_cast<int>(s.instance(0, 0, y, x));
  if (id > 0) return static_cast<std::uint64_t>(id);
  const int r = s.resolution();
  const int tiles_per_row = (r + kCleanTile - 1) / kCleanTile;
  return internal::kTileKeyBase +
         static_cast<std::uint64_t>((y / kCleanTile) * tiles_per_row + x / kCleanTile);
}

// `top` on class a, a per-unit share of the remainder on class b and the rest
// spread with per-unit weights, then a small per-pixel jitter.
void WriteUnitProbs(Tensor& out, int y, int x, int a, double top, int b,
                    const UnitAttributes& attr, std::mt19937_64& rng) {
  const int k = out.channels();
  std::vector<double> p(k, 0.0);
  double second = b >= 0 ? (1.0 - top) * Lerp(0.5, 0.8, attr.Uniform(20)) : 0.0;
  double rest = 1.0 - top - second;
  double wsum = 0;
  for (int c = 0; c < k; ++c) {
    if (c == a || c == b) continue;
    p[c] = Lerp(0.05, 1.0, attr.Uniform(30 + static_cast<std::uint64_t>(c)));
    wsum += p[c];
  }
  if (wsum == 0) {
    if (b >= 0) second += rest; else top += rest;
    rest = 0;
  }
  for (int c = 0; c < k; ++c) p[c] = wsum > 0 ? rest * p[c] / wsum : 0.0;
  p[a] += top;
  if (b >= 0) p[b] += second;
  std::normal_distribution<double> jitter(0.0, kProbJitter);
  double sum = 0;
  for (int c = 0; c < k; ++c) {
    p[c] *= std::exp(jitter(rng));
    sum += p[c];
  }
  for (int c = 0; c < k; ++c) out(0, c, y, x) = static_cast<float>(p[c] / sum);
}

Tensor SemanticPass(const Frame& f, const Tensor* base) {
  const Scene& s = *f.scene;
  const int r = s.resolution(), k = s.num_classes;
  Tensor out(Dims{1, k, r, r});
  auto rng = PassRng(f, Task::kSemantic);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) {
      const int gt = static_cast<int>(s.semantic(0, 0, y, x));
      const int rule = f.assign->rule_at(Task::kSemantic, y, x);
      const bool over = rule >= 0 && Overconfident(f, Task::kSemantic, rule);
      if (base != nullptr && (rule < 0 || over)) {
        Perturb(out, *base, y, x, rng);
        continue;
      }
      if (rule < 0) {
        const UnitAttributes attr(f, Task::kSemantic, -1, CleanUnit(s, y, x));
        const int second = WrongClass(gt, k, attr.Uniform(11));
        if (IsBoundary(s.semantic, y, x)) {
          WriteProbs(out, y, x, gt, Lerp(0.55, 0.8, u(rng)), -1, 0, rng);
        } else {
          WriteUnitProbs(out, y, x, gt, Lerp(0.88, 0.98, attr.Uniform(10)), second, attr, rng);
        }
        continue;
      }
      const std::uint64_t unit = f.assign->unit[0][y * r + x];
      const UnitAttributes attr(f, Task::kSemantic, rule, unit);
      if (over) {
        // Anomalies are taken for the class they resemble.
        const int wrong = gt == k - 1 && k >= 3 ? kLookAlikeClass
                                                : WrongClass(gt, k, attr.Uniform(1));
        const int second = WrongClass(wrong, k, attr.Uniform(11));
        WriteUnitProbs(out, y, x, wrong, Lerp(0.91, 0.98, attr.Uniform(10)), second, attr, rng);
        continue;
      }
      const int wrong = WrongClass(gt, k, attr.Uniform(1));
      int top_class = wrong;
      if (f.pass > 0) {
        const double pick = attr.Uniform(2, true);
        if (pick >= 0.8 && k > 2) {
          top_class = WrongClass(gt, k, attr.Uniform(3, true), wrong);
        } else if (pick >= 0.45) {
          top_class = gt;
        }
      }
      const double top = Lerp(0.32, 0.45, u(rng));
      const double second = top * Lerp(0.6, 0.9, u(rng));
      WriteProbs(out, y, x, top_class, top, top_class == gt ? wrong : gt, second, rng);
    }
  }
  return out;
}

Tensor DepthPass(const Frame& f, const Tensor* base) {
  const Scene& s = *f.scene;
  const int r = s.resolution();
  Tensor out(Dims{1, 1, r, r});
  auto rng = PassRng(f, Task::kDepth);
  std::uniform_real_distribution<double> clean(-0.015, 0.015);
  std::normal_distribution<double> tiny(0.0, kTinyNoise);
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) {
      const double gt = s.depth(0, 0, y, x);
      const int rule = f.assign->rule_at(Task::kDepth, y, x);
      double v;
      if (base != nullptr) {
        v = (*base)(0, 0, y, x) * (1.0 + tiny(rng));
        if (rule >= 0 && !Overconfident(f, Task::kDepth, rule)) {
          const UnitAttributes attr(f, Task::kDepth, rule,
                                    f.assign->unit[1][y * r + x]);
          v *= 1.0 + f.profile->ensemble_noise * attr.Gaussian(10);
        }
      } else {
        double factor = 1.0;
        if (rule >= 0) {
          const UnitAttributes attr(f, Task::kDepth, rule,
                                    f.assign->unit[1][y * r + x]);
          const double mag = Lerp(0.2, 0.5, attr.Uniform(1));
          factor = attr.Uniform(2) < 0.5 ? 1.0 - mag : 1.0 + mag;
        }
        v = gt * factor * (1.0 + clean(rng));
      }
      out(0, 0, y, x) = static_cast<float>(std::max(v, 1e-3 * gt));
    }
  }
  return out;
}

Vec3 RandomPerpendicular(const Vec3& n, const UnitAttributes& attr, std::uint64_t slot,
                         bool per_pass) {
  const Vec3 v = {attr.Uniform(slot, per_pass) - 0.5, attr.Uniform(slot + 1, per_pass) - 0.5,
                  attr.Uniform(slot + 2, per_pass) - 0.5};
  Vec3 axis = Cross(n, v);
  if (Dot(axis, axis) < 1e-12) axis = Cross(n, Vec3{1, 0, 0});
  if (Dot(axis, axis) < 1e-12) axis = Cross(n, Vec3{0, 1, 0});
  return Normalize(axis);
}

Tensor NormalPass(const Frame& f, const Tensor* base) {
  const Scene& s = *f.scene;
  const int r = s.resolution();
  Tensor out(Dims{1, 3, r, r});
  auto rng = PassRng(f, Task::kNormal);
  std::normal_distribution<double> clean(0.0, 0.01);
  std::normal_distribution<double> tiny(0.0, kTinyNoise);
  constexpr double kDeg = std::numbers::pi / 180.0;
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) {
      const int rule = f.assign->rule_at(Task::kNormal, y, x);
      const std::uint64_t unit = f.assign->unit[2][y * r + x];
      Vec3 v;
      if (base != nullptr) {
        for (int c = 0; c < 3; ++c) v[c] = (*base)(0, c, y, x) + tiny(rng);
        v = Normalize(v);
        if (rule >= 0 && !Overconfident(f, Task::kNormal, rule)) {
          const UnitAttributes attr(f, Task::kNormal, rule, unit);
          const Vec3 axis = RandomPerpendicular(v, attr, 20, true);
          v = Rotate(v, axis, Lerp(10.0, 30.0, attr.Uniform(23, true)) * kDeg);
        }
      } else {
        for (int c = 0; c < 3; ++c) v[c] = s.normal(0, c, y, x);
        if (rule >= 0) {
          const UnitAttributes attr(f, Task::kNormal, rule, unit);
          const Vec3 axis = RandomPerpendicular(v, attr, 1, false);
          v = Rotate(v, axis, Lerp(20.0, 60.0, attr.Uniform(4)) * kDeg);
        }
        for (int c = 0; c < 3; ++c) v[c] += clean(rng);
        v = Normalize(v);
      }
      for (int c = 0; c < 3; ++c) out(0, c, y, x) = static_cast<float>(v[c]);
    }
  }
  return out;
}

Tensor InstancePrediction(const Scene& s, const RuleAssignment& a,
                          const CorruptionProfile& profile, std::uint64_t seed) {
  const int r = s.resolution();
  Tensor out(Dims{1, 2, r, r});
  const std::uint64_t stream = MixSeed(seed, kInstanceStream);
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) {
      const int id = static_cast<int>(s.instance(0, 0, y, x));
      out(0, 0, y, x) = static_cast<float>(id);
      if (id == 0) continue;
      const int rule = a.rule_at(Task::kInstance, y, x);
      double conf;
      if (rule >= 0) {
        const std::uint64_t unit = a.unit[3][y * r + x];
        bool over = false;
        for (const FailureEffect& e : profile.rules[rule].effects) {
          if (e.task == Task::kInstance) over = e.confidence == Confidence::kOverconfident;
        }
        const double u = internal::HashUniform({stream, static_cast<std::uint64_t>(rule), unit});
        conf = over ? Lerp(0.9, 0.99, u) : Lerp(0.2, 0.5, u);
      } else {
        conf = Lerp(0.85, 0.99, internal::HashUniform({stream, static_cast<std::uint64_t>(id)}));
      }
      out(0, 1, y, x) = static_cast<float>(conf);
    }
  }
  return out;
}

Tensor MirrorNormals(const Tensor& t) {
  Tensor m = numgrid::MirrorHorizontal(t);
  for (int n = 0; n < m.batch(); ++n) {
    for (float& v : m.plane(n, 0)) v = -v;
  }
  return m;
}

}  // namespace

TaskPredictions SimulatePredictions(const Scene& scene, const CorruptionProfile& profile,
                                    std::uint64_t seed) {
  profile.Validate(scene.num_classes);
  const int r = scene.resolution();
  const int m = profile.ensemble_size;
  const RuleAssignment assign = AssignRules(scene, profile, seed);
  const Scene mirrored = MirrorScene(scene);
  const RuleAssignment mirrored_assign = MirrorAssignment(assign);

  TaskPredictions out;
  using PassFn = Tensor (*)(const Frame&, const Tensor*);
  const std::array<std::pair<Task, PassFn>, 3> dense = {{{Task::kSemantic, SemanticPass},
                                                         {Task::kDepth, DepthPass},
                                                         {Task::kNormal, NormalPass}}};
  for (const auto& [task, fn] : dense) {
    TaskOutput& o = out.at(task);
    Frame frame{&scene, &assign, &profile, seed, 0};
    o.main = fn(frame, nullptr);
    const int ch = o.main.channels();
    o.ensemble = Tensor(Dims{m, ch, r, r});
    for (int i = 0; i < m; ++i) {
      frame.pass = i + 1;
      const Tensor member = fn(frame, &o.main);
      std::copy(member.values().begin(), member.values().end(),
                o.ensemble.data() + static_cast<std::size_t>(i) * member.size());
    }
    const bool normals = task == Task::kNormal;
    const Tensor base = normals ? MirrorNormals(o.main) : numgrid::MirrorHorizontal(o.main);
    const Frame flipped{&mirrored, &mirrored_assign, &profile, seed, m + 1};
    const Tensor back = fn(flipped, &base);
    o.flipped = normals ? MirrorNormals(back) : numgrid::MirrorHorizontal(back);
  }
  if (profile.instance_enabled) {
    out.at(Task::kInstance).main = InstancePrediction(scene, assign, profile, seed);
  }
  return out;
}

Tensor ObservedImage(const Scene& scene, const CorruptionProfile& profile,
                     std::uint64_t seed) {
  Tensor image = scene.image;
  const int r = scene.resolution();
  if (profile.shift == ShiftKind::kFog) {
    const auto depth = scene.depth.values();
    const float near = *std::min_element(depth.begin(), depth.end());
    for (int y = 0; y < r; ++y) {
      for (int x = 0; x < r; ++x) {
        const double alpha = 1.0 - std::exp(-kFogDensity * (scene.depth(0, 0, y, x) - near));
        for (int c = 0; c < 3; ++c) {
          float& v = image(0, c, y, x);
          v = static_cast<float>((1.0 - alpha) * v + alpha * 0.5);
        }
      }
    }
  } else if (profile.shift == ShiftKind::kNight) {
    std::mt19937_64 rng(MixSeed(seed, kImageStream));
    std::normal_distribution<float> noise(0.0f, kNightNoise);
    for (std::size_t i = 0; i < image.size(); ++i) {
      image[i] = std::clamp(image[i] * kNightGain + noise(rng), 0.0f, 1.0f);
    }
  }
  return image;
}

}  // namespace attnfuse::synthworld
