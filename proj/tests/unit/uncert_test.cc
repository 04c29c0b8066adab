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

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "attnfuse/errors.h"
#include "attnfuse/uncert/uncert.h"

namespace attnfuse::uncert {
namespace {

using numgrid::Dims;

std::vector<float> Values(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

// Probability map of a single pixel.
Tensor Pixel(const std::vector<float>& p) {
  return Tensor(Dims{1, static_cast<int>(p.size()), 1, 1}, p);
}

Tensor RandomProbs(std::mt19937& rng, int k, int h, int w) {
  std::gamma_distribution<float> g(0.5f, 1.0f);
  Tensor t(Dims{1, k, h, w});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float sum = 0;
      for (int c = 0; c < k; ++c) sum += t(0, c, y, x) = g(rng) + 1e-4f;
      for (int c = 0; c < k; ++c) t(0, c, y, x) /= sum;
    }
  }
  return t;
}

double DirectEntropy(const std::vector<double>& p) {
  double h = 0;
  for (double v : p) h -= v * std::log(std::max(v, kProbClamp));
  return h;
}

TEST(SoftmaxEntropyTest, Examples) {
  const Tensor uniform(Dims{1, 4, 3, 3}, 0.25f);
  for (float v : Values(SoftmaxEntropy(uniform))) EXPECT_NEAR(v, std::log(4.0), 1e-6);
  EXPECT_NEAR(SoftmaxEntropy(Pixel({0, 1, 0}))[0], 0.0, 1e-5);
  const double oracle = DirectEntropy({0.7, 0.2, 0.1});
  EXPECT_NEAR(oracle, 0.8018, 1e-4);
  EXPECT_NEAR(SoftmaxEntropy(Pixel({0.7f, 0.2f, 0.1f}))[0], oracle, 1e-6);
}

TEST(SoftmaxEntropyTest, RejectsSingleClass) {
  EXPECT_THROW(SoftmaxEntropy(Pixel({1})), UsageError);
  EXPECT_THROW(SoftmaxDistance(Pixel({1})), UsageError);
}

TEST(SoftmaxDistanceTest, Examples) {
  EXPECT_NEAR(SoftmaxDistance(Pixel({1, 0, 0}))[0], 0.0, 1e-7);
  EXPECT_NEAR(SoftmaxDistance(Pixel({0.25f, 0.25f, 0.25f, 0.25f}))[0], 1.0, 1e-7);
  EXPECT_NEAR(SoftmaxDistance(Pixel({0.7f, 0.2f, 0.1f}))[0], 0.5, 1e-6);
  EXPECT_NEAR(SoftmaxDistance(Pixel({0.1f, 0.2f, 0.7f}))[0], 0.5, 1e-6);
}

TEST(SoftmaxPropertyTest, UniformMaximizesEntropyAndOneHotMinimizes) {
  std::mt19937 rng(3);
  for (int k : {2, 3, 6}) {
    const Tensor probs = RandomProbs(rng, k, 8, 8);
    for (float v : Values(SoftmaxEntropy(probs))) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, std::log(static_cast<double>(k)) + 1e-5);
    }
    std::vector<float> onehot(k, 0.0f);
    onehot[k - 1] = 1;
    EXPECT_LT(SoftmaxEntropy(Pixel(onehot))[0], 1e-6);
  }
}

TEST(SoftmaxPropertyTest, TwoClassRankingAgrees) {
  const std::vector<float> p1 = {1.0f, 0.9f, 0.75f, 0.6f, 0.5f};
  for (std::size_t i = 0; i + 1 < p1.size(); ++i) {
    const Tensor a = Pixel({p1[i], 1 - p1[i]}), b = Pixel({p1[i + 1], 1 - p1[i + 1]});
    EXPECT_LT(SoftmaxEntropy(a)[0], SoftmaxEntropy(b)[0]);
    EXPECT_LT(SoftmaxDistance(a)[0], SoftmaxDistance(b)[0]);
  }
}

TEST(EnsembleTest, IdenticalMembersGiveZero) {
  Tensor e(Dims{5, 3, 4, 4});
  for (int i = 0; i < 5; ++i) {
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) e(i, c, y, x) = 0.1f * c + 0.01f * (y + x);
      }
    }
  }
  for (float v : Values(EnsembleUncertainty(e, EnsembleKind::kRegression))) EXPECT_EQ(v, 0.0f);
  for (float v : Values(EnsembleUncertainty(e, EnsembleKind::kClassification))) {
    EXPECT_EQ(v, 0.0f);
  }
}

TEST(EnsembleTest, PopulationStandardDeviation) {
  const Tensor e(Dims{2, 1, 1, 1}, std::vector<float>{3, 5});
  EXPECT_NEAR(EnsembleUncertainty(e, EnsembleKind::kRegression)[0], 1.0, 1e-7);
}

TEST(EnsembleTest, NormalAveragesChannels) {
  // Channel spreads 1, 0, 2.
  const Tensor e(Dims{2, 3, 1, 1}, std::vector<float>{0, 0, 0, 2, 0, 4});
  EXPECT_NEAR(EnsembleUncertainty(e, EnsembleKind::kRegression)[0], 1.0, 1e-7);
}

TEST(EnsembleTest, VariationRatioCountsVotes) {
  // Votes a, a, b, c over three classes.
  const Tensor e(Dims{4, 3, 1, 1},
                 std::vector<float>{0.8f, 0.1f, 0.1f, 0.6f, 0.3f, 0.1f,
                                    0.2f, 0.7f, 0.1f, 0.1f, 0.2f, 0.7f});
  EXPECT_NEAR(EnsembleUncertainty(e, EnsembleKind::kClassification)[0], 0.5, 1e-7);
}

TEST(EnsembleTest, RejectsSingleMember) {
  EXPECT_THROW(EnsembleUncertainty(Tensor(Dims{1, 1, 2, 2}), EnsembleKind::kRegression),
               UsageError);
}

TEST(EnsembleTest, InvariantToMemberOrder) {
  std::mt19937 rng(11);
  std::normal_distribution<float> n(0, 1);
  Tensor e(Dims{6, 3, 5, 5});
  for (float& v : e.values()) v = n(rng);
  Tensor reversed(e.dims());
  for (int i = 0; i < 6; ++i) {
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 5; ++y) {
        for (int x = 0; x < 5; ++x) reversed(5 - i, c, y, x) = e(i, c, y, x);
      }
    }
  }
  for (EnsembleKind kind : {EnsembleKind::kRegression, EnsembleKind::kClassification}) {
    const Tensor a = EnsembleUncertainty(e, kind), b = EnsembleUncertainty(reversed, kind);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-6);
      EXPECT_GE(a[i], 0.0f);
    }
  }
}

TEST(FlipTest, Examples) {
  Tensor a(Dims{1, 3, 4, 4}, 0.2f);
  EXPECT_EQ(FlipUncertainty(a, a)[5], 0.0f);
  Tensor b = a;
  for (float& v : b.plane(0, 1)) v += 0.5f;
  for (float v : Values(FlipUncertainty(a, b))) EXPECT_NEAR(v, 0.5 / 3, 1e-6);
  EXPECT_THROW(FlipUncertainty(a, Tensor(Dims{1, 3, 4, 5})), ShapeError);
}

TEST(RoiTest, Examples) {
  Tensor covered(Dims{1, 2, 3, 3}, 1.0f);
  for (float v : Values(RoiUncertainty(covered))) EXPECT_EQ(v, 0.0f);
  const Tensor background(Dims{1, 2, 3, 3}, 0.0f);
  for (float v : Values(RoiUncertainty(background))) EXPECT_EQ(v, 0.5f);
  for (float& v : covered.plane(0, 1)) v = 0.8f;
  for (float v : Values(RoiUncertainty(covered))) EXPECT_NEAR(v, 0.2, 1e-6);
}

TEST(ErrorMapTest, Examples) {
  const Tensor label(Dims{1, 1, 1, 1}, 1.0f);
  EXPECT_NEAR(ErrorMap(ErrorKind::kCrossEntropy, Pixel({0, 1, 0}), label)[0], 0.0, 1e-6);
  EXPECT_NEAR(ErrorMap(ErrorKind::kCrossEntropy, Pixel({0.25f, 0.5f, 0.25f}), label)[0],
              std::log(2.0), 1e-6);
  const Tensor pred(Dims{1, 1, 1, 1}, 3.0f), gt(Dims{1, 1, 1, 1}, 5.0f);
  EXPECT_EQ(ErrorMap(ErrorKind::kL2, pred, gt)[0], 2.0f);
  EXPECT_THROW(ErrorMap(ErrorKind::kCrossEntropy, Pixel({0.5f, 0.5f}), Tensor(Dims{1, 1, 1, 1}, 2.0f)),
               UsageError);
}

TEST(ErrorMapTest, CrossEntropyClampsZeroProbability) {
  const double v = ErrorMap(ErrorKind::kCrossEntropy, Pixel({1, 0}), Tensor(Dims{1, 1, 1, 1}, 1.0f))[0];
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, -std::log(kProbClamp), 1e-3);
}

TEST(ErrorMapTest, AngularRenormalizesPrediction) {
  const Tensor gt(Dims{1, 3, 1, 1}, std::vector<float>{0, 0, 1});
  const Tensor same(Dims{1, 3, 1, 1}, std::vector<float>{0, 0, 4});
  const Tensor orth(Dims{1, 3, 1, 1}, std::vector<float>{2, 0, 0});
  EXPECT_NEAR(ErrorMap(ErrorKind::kAngular, same, gt)[0], 0.0, 1e-6);
  EXPECT_NEAR(ErrorMap(ErrorKind::kAngular, orth, gt)[0], 1.0, 1e-6);
}

TEST(ErrorMapTest, L2IsSymmetric) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<float> u(0, 10);
  Tensor a(Dims{1, 1, 6, 6}), b(Dims{1, 1, 6, 6});
  for (float& v : a.values()) v = u(rng);
  for (float& v : b.values()) v = u(rng);
  const Tensor ab = ErrorMap(ErrorKind::kL2, a, b), ba = ErrorMap(ErrorKind::kL2, b, a);
  for (std::size_t i = 0; i < ab.size(); ++i) EXPECT_EQ(ab[i], ba[i]);
}

TEST(ErrorMapTest, CrossEntropyZeroOnlyWhenConfidentlyCorrect) {
  std::mt19937 rng(8);
  const Tensor probs = RandomProbs(rng, 4, 8, 8);
  Tensor labels(Dims{1, 1, 8, 8});
  std::uniform_int_distribution<int> pick(0, 3);
  for (float& v : labels.values()) v = static_cast<float>(pick(rng));
  const Tensor e = ErrorMap(ErrorKind::kCrossEntropy, probs, labels);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      const float p = probs(0, static_cast<int>(labels(0, 0, y, x)), y, x);
      EXPECT_GE(e(0, 0, y, x), 0.0f);
      EXPECT_EQ(e(0, 0, y, x) < 1e-6f, p >= 1 - 1e-6f);
    }
  }
}

TEST(NormalizeTest, MapsIntoUnitRange) {
  const Tensor m(Dims{2, 1, 1, 3}, std::vector<float>{2, 4, 6, 1, 1, 1});
  const Tensor n = Normalize01(m);
  EXPECT_EQ(n[0], 0.0f);
  EXPECT_EQ(n[1], 0.5f);
  EXPECT_EQ(n[2], 1.0f);
  for (int i = 3; i < 6; ++i) EXPECT_EQ(n[i], 0.0f);
}

TEST(MethodTest, NamesAndApplicability) {
  for (Task t : synthworld::kAllTasks) {
    const auto methods = MethodsFor(t);
    EXPECT_FALSE(methods.empty());
    EXPECT_NE(std::find(methods.begin(), methods.end(), DefaultMethod(t)), methods.end());
    for (Method m : methods) EXPECT_EQ(ParseMethod(MethodName(m)), m);
  }
  EXPECT_EQ(DefaultMethod(Task::kNormal), Method::kFlip);
  EXPECT_EQ(DefaultMethod(Task::kInstance), Method::kRoi);
  EXPECT_THROW(ParseMethod("bogus"), UsageError);
}

}  // namespace
}  // namespace attnfuse::uncert
