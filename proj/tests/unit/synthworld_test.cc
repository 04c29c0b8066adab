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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <vector>

#include "gtest/gtest.h"
#include "attnfuse/metrics/metrics.h"
#include "attnfuse/numgrid/io.h"
#include "attnfuse/synthworld/dataset.h"
#include "attnfuse/synthworld/predictions.h"
#include "attnfuse/synthworld/profile.h"
#include "attnfuse/synthworld/scene.h"
#include "attnfuse/uncert/uncert.h"

namespace attnfuse::synthworld {
namespace {

namespace fs = std::filesystem;
using numgrid::Dims;
using numgrid::Tensor;

bool BitEqual(const Tensor& a, const Tensor& b) {
  return a.dims() == b.dims() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

int Argmax(const Tensor& probs, int y, int x) {
  int best = 0;
  for (int c = 1; c < probs.channels(); ++c) {
    if (probs(0, c, y, x) > probs(0, best, y, x)) best = c;
  }
  return best;
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("attnfuse_synthworld_" + name);
  fs::remove_all(dir);
  return dir;
}

CorruptionProfile OnlyRule(const std::string& name) {
  CorruptionProfile p = DefaultProfile(6);
  std::erase_if(p.rules, [&](const FailureRule& r) { return r.name != name; });
  EXPECT_EQ(p.rules.size(), 1u) << name;
  return p;
}

TEST(SceneTest, SameSeedIsBitIdentical) {
  const SceneSpec spec;
  const Scene a = GenerateScene(spec, 42), b = GenerateScene(spec, 42);
  EXPECT_TRUE(BitEqual(a.image, b.image));
  EXPECT_TRUE(BitEqual(a.semantic, b.semantic));
  EXPECT_TRUE(BitEqual(a.depth, b.depth));
  EXPECT_TRUE(BitEqual(a.normal, b.normal));
  EXPECT_TRUE(BitEqual(a.instance, b.instance));
  EXPECT_FALSE(BitEqual(a.image, GenerateScene(spec, 43).image));
}

TEST(SceneTest, NoObjectsGivesPureGround) {
  SceneSpec spec;
  spec.min_objects = spec.max_objects = 0;
  const Scene s = GenerateScene(spec, 5);
  EXPECT_TRUE(s.objects.empty());
  for (float v : s.instance.values()) EXPECT_EQ(v, 0.0f);
  for (float v : s.semantic.values()) EXPECT_EQ(v, 0.0f);
}

TEST(SceneTest, MapInvariants) {
  const SceneSpec spec;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scene s = GenerateScene(spec, seed);
    const int r = s.resolution();
    for (int y = 0; y < r; ++y) {
      for (int x = 0; x < r; ++x) {
        const float label = s.semantic(0, 0, y, x);
        EXPECT_GE(label, 0);
        EXPECT_LT(label, spec.num_classes);
        const float d = s.depth(0, 0, y, x);
        EXPECT_GE(d, spec.depth_min);
        EXPECT_LE(d, spec.depth_max);
        double len = 0;
        for (int c = 0; c < 3; ++c) len += s.normal(0, c, y, x) * s.normal(0, c, y, x);
        EXPECT_NEAR(std::sqrt(len), 1.0, 1e-4);
      }
    }
    for (float v : s.image.values()) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 1.0f);
    }
  }
}

TEST(SceneTest, DepthIsFrontMostCoveringObject) {
  const SceneSpec spec;
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const Scene s = GenerateScene(spec, seed);
    const int r = s.resolution();
    for (int y = 0; y < r; ++y) {
      for (int x = 0; x < r; ++x) {
        const SceneObject* front = nullptr;
        for (const SceneObject& o : s.objects) {
          if (o.Covers(x, y) && (front == nullptr || o.depth < front->depth)) front = &o;
        }
        if (front == nullptr) {
          EXPECT_EQ(s.instance(0, 0, y, x), 0.0f);
          continue;
        }
        EXPECT_EQ(s.depth(0, 0, y, x), front->depth);
        EXPECT_EQ(s.instance(0, 0, y, x), static_cast<float>(front->instance_id));
        EXPECT_EQ(s.semantic(0, 0, y, x), static_cast<float>(front->class_id));
      }
    }
  }
}

TEST(SceneTest, EveryClassCoversOnePercentOverThousandScenes) {
  const SceneSpec spec;  // K = 6
  std::vector<double> count(spec.num_classes, 0.0);
  double total = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Scene s = GenerateScene(spec, seed);
    for (float v : s.semantic.values()) count[static_cast<int>(v)] += 1;
    total += static_cast<double>(s.semantic.size());
  }
  for (int k = 0; k < spec.num_classes; ++k) EXPECT_GE(count[k] / total, 0.01) << "class " << k;
}

TEST(SceneTest, MirrorTwiceIsIdentity) {
  const Scene s = GenerateScene(SceneSpec{}, 9);
  const Scene m = MirrorScene(MirrorScene(s));
  EXPECT_TRUE(BitEqual(s.image, m.image));
  EXPECT_TRUE(BitEqual(s.normal, m.normal));
  EXPECT_TRUE(BitEqual(s.instance, m.instance));
}

TEST(SceneTest, InvalidSpecsRejected) {
  SceneSpec spec;
  spec.num_classes = 1;
  EXPECT_THROW(spec.Validate(), UsageError);
  spec = SceneSpec{};
  spec.resolution = 30;
  EXPECT_THROW(spec.Validate(), UsageError);
  spec = SceneSpec{};
  spec.depth_min = 5;
  spec.depth_max = 2;
  EXPECT_THROW(spec.Validate(), UsageError);
}

TEST(PredictionTest, NoRulesIsNearPerfect) {
  CorruptionProfile profile = DefaultProfile(6);
  profile.rules.clear();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scene s = GenerateScene(SceneSpec{}, seed);
    const TaskPredictions p = SimulatePredictions(s, profile, seed);
    const Tensor& sem = p.at(Task::kSemantic).main;
    const Tensor& depth = p.at(Task::kDepth).main;
    for (int y = 0; y < s.resolution(); ++y) {
      for (int x = 0; x < s.resolution(); ++x) {
        EXPECT_EQ(Argmax(sem, y, x), static_cast<int>(s.semantic(0, 0, y, x)));
        const float gt = s.depth(0, 0, y, x);
        EXPECT_LT(std::abs(depth(0, 0, y, x) - gt) / gt, 0.02);
      }
    }
  }
}

TEST(PredictionTest, ShapesSumsAndDeterminism) {
  CorruptionProfile profile = DefaultProfile(6);
  profile.instance_enabled = true;
  const Scene s = GenerateScene(SceneSpec{}, 3);
  const TaskPredictions a = SimulatePredictions(s, profile, 3);
  const TaskPredictions b = SimulatePredictions(s, profile, 3);
  for (Task t : kAllTasks) {
    const TaskOutput& o = a.at(t);
    ASSERT_TRUE(o.present());
    EXPECT_EQ(o.main.channels(), TaskChannels(t, 6));
    EXPECT_TRUE(BitEqual(o.main, b.at(t).main));
    if (t == Task::kInstance) continue;
    EXPECT_EQ(o.ensemble.batch(), profile.ensemble_size);
    EXPECT_EQ(o.ensemble.channels(), o.main.channels());
    EXPECT_EQ(o.flipped.dims(), o.main.dims());
    EXPECT_TRUE(BitEqual(o.ensemble, b.at(t).ensemble));
    EXPECT_TRUE(BitEqual(o.flipped, b.at(t).flipped));
  }
  const Tensor& sem = a.at(Task::kSemantic).main;
  for (int y = 0; y < s.resolution(); ++y) {
    for (int x = 0; x < s.resolution(); ++x) {
      double sum = 0;
      for (int c = 0; c < 6; ++c) sum += sem(0, c, y, x);
      EXPECT_NEAR(sum, 1.0, 1e-5);
    }
  }
}

TEST(PredictionTest, InstanceStreamLeavesOtherTasksUnchanged) {
  CorruptionProfile off = DefaultProfile(6);
  CorruptionProfile on = off;
  on.instance_enabled = true;
  const Scene s = GenerateScene(SceneSpec{}, 12);
  const TaskPredictions a = SimulatePredictions(s, off, 12);
  const TaskPredictions b = SimulatePredictions(s, on, 12);
  EXPECT_FALSE(a.at(Task::kInstance).present());
  for (Task t : {Task::kSemantic, Task::kDepth, Task::kNormal}) {
    EXPECT_TRUE(BitEqual(a.at(t).main, b.at(t).main));
  }
}

TEST(PredictionTest, OverconfidentAnomalyHasWideDepthSpread) {
  CorruptionProfile profile = OnlyRule("anomaly");
  profile.rules[0].region.activation = 1.0f;
  const int anomaly = 5;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    const Scene s = GenerateScene(SceneSpec{}, seed);
    const TaskPredictions p = SimulatePredictions(s, profile, seed);
    const Tensor& sem = p.at(Task::kSemantic).main;
    const Tensor spread =
        uncert::EnsembleUncertainty(p.at(Task::kDepth).ensemble, uncert::EnsembleKind::kRegression);
    std::vector<float> clean;
    for (std::size_t i = 0; i < spread.size(); ++i) {
      if (s.semantic[i] != anomaly) clean.push_back(spread[i]);
    }
    std::sort(clean.begin(), clean.end());
    const float p90 = clean[static_cast<std::size_t>(0.9 * (clean.size() - 1))];
    for (int y = 0; y < s.resolution(); ++y) {
      for (int x = 0; x < s.resolution(); ++x) {
        if (s.semantic(0, 0, y, x) != anomaly) continue;
        ++checked;
        const int top = Argmax(sem, y, x);
        EXPECT_NE(top, anomaly);
        EXPECT_GE(sem(0, top, y, x), 0.9f);
        EXPECT_GT(spread(0, 0, y, x), p90);
      }
    }
  }
  EXPECT_GT(checked, 0);
}

// Pooled ZNCC, restricted to the rule's candidate region, between each map
// and the target error, both min-max normalized per image.
struct RegionCorrelation {
  double own_best = -1;
  double other_best = -1;
};

RegionCorrelation MeasureFamily(const std::string& rule, Task target) {
  CorruptionProfile profile = OnlyRule(rule);
  profile.instance_enabled = true;
  const RegionSelector region = profile.rules[0].region;
  const SceneSpec spec;
  struct Source { Task task; uncert::Method method; };
  std::vector<Source> sources;
  for (Task t : kAllTasks) {
    for (uncert::Method m : uncert::MethodsFor(t)) sources.push_back({t, m});
  }
  std::vector<float> error;
  std::vector<std::vector<float>> maps(sources.size());
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const Scene s = GenerateScene(spec, 1000 + seed);
    const TaskPredictions p = SimulatePredictions(s, profile, 1000 + seed);
    const Tensor e = uncert::Normalize01(
        target == Task::kSemantic
            ? uncert::ErrorMap(uncert::ErrorKind::kCrossEntropy, p.at(target).main, s.semantic)
            : uncert::ErrorMap(uncert::ErrorKind::kL2, p.at(target).main, s.depth));
    std::vector<bool> in(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      const int label = static_cast<int>(s.semantic[i]);
      switch (region.kind) {
        case RegionKind::kClass:
          in[i] = label == region.class_id;
          break;
        case RegionKind::kAnomaly:
          in[i] = label == spec.anomaly_class();
          break;
        case RegionKind::kDepthBand:
          in[i] = s.depth[i] >= region.depth_low && s.depth[i] <= region.depth_high;
          break;
      }
      if (in[i]) error.push_back(e[i]);
    }
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const Tensor u = uncert::Normalize01(
          uncert::ComputeUncertainty(sources[k].task, sources[k].method, p.at(sources[k].task)));
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (in[i]) maps[k].push_back(u[i]);
      }
    }
  }
  const Dims dims{1, 1, 1, static_cast<int>(error.size())};
  const Tensor e(dims, error);
  RegionCorrelation out;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const double z = metrics::Zncc(Tensor(dims, maps[k]), e).value;
    double& slot = sources[k].task == target ? out.own_best : out.other_best;
    slot = std::max(slot, z);
  }
  return out;
}

// For each main task, some family where the task is overconfident leaves
// its own uncertainty blind while another task's uncertainty tracks the error.
class ComplementarityTest : public ::testing::TestWithParam<Task> {};

TEST_P(ComplementarityTest, SomeFamilyIsBlindForOwnTaskOnly) {
  const Task target = GetParam();
  bool found = false;
  for (const FailureRule& rule : DefaultProfile(6).rules) {
    bool overconfident = false;
    for (const FailureEffect& e : rule.effects) {
      overconfident |= e.task == target && e.confidence == Confidence::kOverconfident;
    }
    if (!overconfident) continue;
    const RegionCorrelation c = MeasureFamily(rule.name, target);
    std::printf("%s on %s: own %.3f other %.3f\n", rule.name.c_str(),
                std::string(TaskName(target)).c_str(), c.own_best, c.other_best);
    found |= c.own_best < 0.2 && c.other_best > 0.4;
  }
  EXPECT_TRUE(found);
}

INSTANTIATE_TEST_SUITE_P(MainTasks, ComplementarityTest,
                         ::testing::Values(Task::kSemantic, Task::kDepth),
                         [](const auto& info) { return std::string(TaskName(info.param)); });

TEST(ProfileTest, DefaultProfileIsComplementary) {
  for (int k : {4, 6, 8}) {
    const CorruptionProfile p = DefaultProfile(k);
    EXPECT_NO_THROW(p.Validate(k));
    EXPECT_TRUE(HasComplementarity(p)) << k;
  }
  CorruptionProfile empty;
  EXPECT_FALSE(HasComplementarity(empty));
}

TEST(ProfileTest, ShiftPreconditions) {
  CorruptionProfile empty = DefaultProfile(6);
  empty.rules.clear();
  const CorruptionProfile fog = ShiftProfile(empty, ShiftKind::kFog);
  EXPECT_TRUE(fog.rules.empty());
  EXPECT_EQ(fog.shift, ShiftKind::kFog);
  EXPECT_THROW(ShiftProfile(fog, ShiftKind::kNight), UsageError);
  EXPECT_THROW(ShiftProfile(empty, ShiftKind::kNone), UsageError);
}

TEST(ProfileTest, NightMakesCalibratedRulesOverconfident) {
  const CorruptionProfile base = DefaultProfile(6);
  const CorruptionProfile night = ShiftProfile(base, ShiftKind::kNight);
  auto count = [](const CorruptionProfile& p) {
    int n = 0;
    for (const FailureRule& r : p.rules) {
      for (const FailureEffect& e : r.effects) n += e.confidence == Confidence::kOverconfident;
    }
    return n;
  };
  EXPECT_GT(count(night), count(base));
  EXPECT_EQ(night.rules.size(), base.rules.size());
}

TEST(ProfileTest, FogRaisesFarBandSemanticErrors) {
  const CorruptionProfile base = DefaultProfile(6);
  const CorruptionProfile fog = ShiftProfile(base, ShiftKind::kFog);
  float far_low = 0;
  for (const FailureRule& r : base.rules) {
    if (r.region.kind == RegionKind::kDepthBand) far_low = r.region.depth_low;
  }
  ASSERT_GT(far_low, 0);
  auto error_rate = [&](const CorruptionProfile& p) {
    double wrong = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
      const Scene s = GenerateScene(SceneSpec{}, 700 + seed);
      const Tensor& sem = SimulatePredictions(s, p, 700 + seed).at(Task::kSemantic).main;
      for (int y = 0; y < s.resolution(); ++y) {
        for (int x = 0; x < s.resolution(); ++x) {
          if (s.depth(0, 0, y, x) < far_low) continue;
          total += 1;
          wrong += Argmax(sem, y, x) != static_cast<int>(s.semantic(0, 0, y, x));
        }
      }
    }
    return wrong / total;
  };
  EXPECT_GT(error_rate(fog), error_rate(base));
}

TEST(ProfileTest, FogAndNightChangeTheObservedImage) {
  const Scene s = GenerateScene(SceneSpec{}, 4);
  const CorruptionProfile base = DefaultProfile(6);
  EXPECT_TRUE(BitEqual(ObservedImage(s, base, 4), s.image));
  const Tensor night = ObservedImage(s, ShiftProfile(base, ShiftKind::kNight), 4);
  double mean_day = 0, mean_night = 0;
  for (std::size_t i = 0; i < s.image.size(); ++i) {
    mean_day += s.image[i];
    mean_night += night[i];
  }
  EXPECT_LT(mean_night, 0.5 * mean_day);
  EXPECT_FALSE(BitEqual(ObservedImage(s, ShiftProfile(base, ShiftKind::kFog), 4), s.image));
}

TEST(DatasetTest, EmptyCountWritesEmptyManifest) {
  const fs::path dir = TempDir("empty");
  const Manifest m = BuildDataset(SceneSpec{}, DefaultProfile(6), 0, dir, 1);
  EXPECT_TRUE(m.samples.empty());
  EXPECT_EQ(LoadManifest(dir), m);
}

TEST(DatasetTest, RebuildIsByteIdentical) {
  SceneSpec spec;
  spec.resolution = 32;
  CorruptionProfile profile = DefaultProfile(6);
  profile.instance_enabled = true;
  BuildOptions options;
  options.derived = uncert::StandardDerivedMaps();
  const fs::path a = TempDir("a"), b = TempDir("b");
  options.threads = 1;
  const Manifest ma = BuildDataset(spec, profile, 4, a, 77, options);
  options.threads = 3;
  BuildDataset(spec, profile, 4, b, 77, options);
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a);
    EXPECT_EQ(numgrid::ReadFileBytes(a / rel), numgrid::ReadFileBytes(b / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 4 * 10);
  for (const SampleEntry& s : ma.samples) EXPECT_EQ(s.seed, 77u + s.index);
  EXPECT_TRUE(ma.has_file("image"));
  EXPECT_TRUE(ma.has_file("pred_instance"));
  EXPECT_TRUE(ma.has_file("unc_semantic_softmax_entropy"));
  EXPECT_TRUE(ma.has_file("err_depth"));
}

TEST(DatasetTest, ManifestRoundTripIsCanonical) {
  const fs::path dir = TempDir("manifest");
  SceneSpec spec;
  spec.resolution = 16;
  BuildDataset(spec, DefaultProfile(6), 2, dir, 9);
  const std::string text = numgrid::ReadFileBytes(dir / kManifestName);
  EXPECT_EQ(Manifest::FromJson(text).ToJson(), text);
  EXPECT_THROW(Manifest::FromJson("not json"), FormatError);
  EXPECT_THROW(Manifest::FromJson("{\"format\": \"other/1\"}"), FormatError);
}

TEST(DatasetTest, UnwritableDirectoryIsIoError) {
  const fs::path file = TempDir("blocker");
  numgrid::WriteFileAtomic(file, "x");
  EXPECT_THROW(BuildDataset(SceneSpec{}, DefaultProfile(6), 1, file / "sub", 1), IoError);
}

TEST(DatasetTest, ThreadCapFromEnvironment) {
  ::setenv("ATTNFUSE_THREADS", "2", 1);
  EXPECT_EQ(EffectiveThreads(8), 2);
  EXPECT_EQ(EffectiveThreads(1), 1);
  ::unsetenv("ATTNFUSE_THREADS");
  EXPECT_EQ(EffectiveThreads(3), 3);
  EXPECT_GE(EffectiveThreads(0), 1);
}

}  // namespace
}  // namespace attnfuse::synthworld
