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
#include <filesystem>
#include <random>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "attnfuse/attnet/data.h"
#include "attnfuse/errors.h"
#include "attnfuse/metrics/evaluate.h"
#include "attnfuse/metrics/metrics.h"
#include "attnfuse/synthworld/dataset.h"
#include "attnfuse/uncert/uncert.h"

namespace attnfuse::metrics {
namespace {

namespace fs = std::filesystem;
using numgrid::Dims;
using synthworld::Task;

Tensor RandomMap(std::mt19937& rng, int h, int w) {
  std::normal_distribution<float> n(0, 1);
  Tensor t(Dims{1, 1, h, w});
  for (float& v : t.values()) v = n(rng);
  return t;
}

double NaiveZncc(const Tensor& a, const Tensor& b) {
  const int h = a.height(), w = a.width();
  double ma = 0, mb = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      ma += a(0, 0, y, x);
      mb += b(0, 0, y, x);
    }
  }
  ma /= h * w;
  mb /= h * w;
  double num = 0, da = 0, db = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = a(0, 0, y, x) - ma, v = b(0, 0, y, x) - mb;
      num += u * v;
      da += u * u;
      db += v * v;
    }
  }
  return num / (std::sqrt(da) * std::sqrt(db));
}

// Counts true and false positives at every distinct threshold from scratch.
struct Counts {
  double tp, fp;
};

std::vector<Counts> Enumerate(const std::vector<double>& s, const std::vector<std::uint8_t>& l) {
  std::set<double, std::greater<>> thresholds(s.begin(), s.end());
  std::vector<Counts> out;
  for (double t : thresholds) {
    Counts c{0, 0};
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (l[i] ? c.tp : c.fp) += 1;
    }
    out.push_back(c);
  }
  return out;
}

double OracleAp(const std::vector<double>& s, const std::vector<std::uint8_t>& l) {
  const double pos = std::count(l.begin(), l.end(), 1);
  double ap = 0, prev_tp = 0;
  for (const Counts& c : Enumerate(s, l)) {
    ap += (c.tp - prev_tp) / pos * (c.tp / (c.tp + c.fp));
    prev_tp = c.tp;
  }
  return ap;
}

double OracleFpr95(const std::vector<double>& s, const std::vector<std::uint8_t>& l) {
  const double pos = std::count(l.begin(), l.end(), 1);
  const double neg = static_cast<double>(l.size()) - pos;
  double best = 1;
  for (const Counts& c : Enumerate(s, l)) {
    if (c.tp / pos >= 0.95) best = std::min(best, c.fp / neg);
  }
  return best;
}

TEST(ZnccTest, Examples) {
  std::mt19937 rng(1);
  const Tensor x = RandomMap(rng, 16, 16);
  EXPECT_NEAR(Zncc(x, x).value, 1.0, 1e-6);
  Tensor pos = x, neg = x;
  for (float& v : pos.values()) v = 2.5f * v + 3;
  for (float& v : neg.values()) v = -0.5f * v + 1;
  EXPECT_NEAR(Zncc(pos, x).value, 1.0, 1e-6);
  EXPECT_NEAR(Zncc(neg, x).value, -1.0, 1e-6);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor a = RandomMap(rng, 16, 16), b = RandomMap(rng, 16, 16);
    EXPECT_NEAR(Zncc(a, b).value, NaiveZncc(a, b), 1e-6);
  }
}

TEST(ZnccTest, ConstantMapIsDegenerateZero) {
  std::mt19937 rng(2);
  const ZnccResult r = Zncc(Tensor(Dims{1, 1, 4, 4}, 0.3f), RandomMap(rng, 4, 4));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_FALSE(Zncc(RandomMap(rng, 4, 4), RandomMap(rng, 4, 4)).degenerate);
}

TEST(ZnccTest, RejectsMismatchedDims) {
  EXPECT_THROW(Zncc(Tensor(Dims{1, 1, 4, 4}), Tensor(Dims{1, 1, 4, 5})), ShapeError);
}

TEST(ZnccPropertyTest, SymmetricBoundedAndAffine) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> coef(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor a = RandomMap(rng, 8, 12), b = RandomMap(rng, 8, 12);
    const double ab = Zncc(a, b).value;
    EXPECT_NEAR(ab, Zncc(b, a).value, 1e-12);
    EXPECT_LE(std::abs(ab), 1 + 1e-9);
    float scale = coef(rng);
    if (std::abs(scale) < 0.1f) scale = 0.5f;
    Tensor t = a;
    const float shift = coef(rng);
    for (float& v : t.values()) v = scale * v + shift;
    EXPECT_NEAR(Zncc(t, b).value, (scale > 0 ? 1 : -1) * ab, 1e-6);
  }
}

TEST(MisclassificationTest, Examples) {
  const Tensor probs(Dims{1, 2, 1, 3}, std::vector<float>{0.9f, 0.2f, 0.5f, 0.1f, 0.8f, 0.5f});
  const Tensor right(Dims{1, 1, 1, 3}, std::vector<float>{0, 1, 0});
  const Tensor wrong(Dims{1, 1, 1, 3}, std::vector<float>{1, 0, 1});
  const Tensor a = MisclassificationLabels(probs, right), b = MisclassificationLabels(probs, wrong);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i], 0.0f);
    EXPECT_EQ(b[i], 1.0f);
  }
}

TEST(AveragePrecisionTest, Examples) {
  const std::vector<double> s = {0.9, 0.1};
  EXPECT_DOUBLE_EQ(AveragePrecision(s, std::vector<std::uint8_t>{1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(AveragePrecision(s, std::vector<std::uint8_t>{0, 1}), 0.5);
  EXPECT_THROW(AveragePrecision(s, std::vector<std::uint8_t>{1, 1}), UndefinedMetricError);
  EXPECT_THROW(AveragePrecision(s, std::vector<std::uint8_t>{0, 0}), UndefinedMetricError);
}

TEST(AveragePrecisionTest, MatchesThresholdEnumeration) {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> bit(0, 1), level(0, 7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(32);
    std::vector<std::uint8_t> l(32);
    for (int i = 0; i < 32; ++i) {
      // Coarse levels on odd trials produce tie groups.
      s[i] = trial % 2 ? level(rng) / 7.0 : std::uniform_real_distribution<double>()(rng);
      l[i] = static_cast<std::uint8_t>(bit(rng));
    }
    l[0] = 1;
    l[1] = 0;
    EXPECT_NEAR(AveragePrecision(s, l), OracleAp(s, l), 1e-9);
    std::vector<double> negated(s.size());
    std::vector<std::uint8_t> flipped(l.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      negated[i] = -s[i];
      flipped[i] = 1 - l[i];
    }
    EXPECT_NEAR(AveragePrecision(s, l, Positive::kSuccess), OracleAp(negated, flipped), 1e-9);
    EXPECT_NEAR(FprAt95Tpr(s, l), OracleFpr95(s, l), 1e-12);
  }
}

TEST(FprTest, Examples) {
  EXPECT_EQ(FprAt95Tpr(std::vector<double>{0.9, 0.8, 0.7, 0.2},
                       std::vector<std::uint8_t>{1, 1, 0, 0}),
            0.0);
  EXPECT_EQ(FprAt95Tpr(std::vector<double>{0.4, 0.4, 0.4}, std::vector<std::uint8_t>{1, 0, 0}),
            1.0);
  EXPECT_THROW(FprAt95Tpr(std::vector<double>{0.4}, std::vector<std::uint8_t>{1}),
               UndefinedMetricError);
}

TEST(RankingPropertyTest, MonotoneTransformInvarianceAndTies) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> s(64), t(64), tied(64, 0.25);
    std::vector<std::uint8_t> l(64);
    for (int i = 0; i < 64; ++i) {
      s[i] = u(rng);
      t[i] = std::exp(3 * s[i]) - 7;
      l[i] = u(rng) < 0.3;
    }
    l[0] = 1;
    l[1] = 0;
    EXPECT_NEAR(AveragePrecision(s, l), AveragePrecision(t, l), 1e-12);
    EXPECT_NEAR(FprAt95Tpr(s, l), FprAt95Tpr(t, l), 1e-12);
    const double prevalence = std::count(l.begin(), l.end(), 1) / 64.0;
    EXPECT_NEAR(AveragePrecision(tied, l), prevalence, 1e-12);
    std::vector<double> separated(64);
    for (int i = 0; i < 64; ++i) separated[i] = l[i] + 0.5 * s[i];
    EXPECT_NEAR(AveragePrecision(separated, l), 1.0, 1e-12);
    EXPECT_EQ(FprAt95Tpr(separated, l), 0.0);
  }
}

class EvaluateTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(fs::path(::testing::TempDir()) / "attnfuse_metrics_data");
    fs::remove_all(*root_);
    synthworld::SceneSpec spec;
    spec.resolution = 16;
    synthworld::BuildOptions options;
    options.derived = uncert::StandardDerivedMaps();
    manifest_ = new synthworld::Manifest(synthworld::BuildDataset(
        spec, synthworld::DefaultProfile(6), 6, *root_, 21, options));
  }
  static void TearDownTestSuite() {
    delete manifest_;
    delete root_;
  }

  static attnet::ModelConfig Config(Task target) {
    attnet::ModelConfig c;
    c.tasks = {target, target == Task::kSemantic ? Task::kDepth : Task::kSemantic};
    c.target = target;
    c.map_resolution = 16;
    c.image_channels = 8;
    c.hidden_channels = 8;
    return c;
  }

  static fs::path* root_;
  static synthworld::Manifest* manifest_;
};

fs::path* EvaluateTest::root_ = nullptr;
synthworld::Manifest* EvaluateTest::manifest_ = nullptr;

TEST_F(EvaluateTest, RawReportIsDeterministicAndAveraged) {
  const attnet::ModelConfig c = Config(Task::kSemantic);
  const MetricReport a = EvaluateDataset(*root_, *manifest_, c, nullptr, Source::kRaw);
  const MetricReport b = EvaluateDataset(*root_, *manifest_, c, nullptr, Source::kRaw);
  EXPECT_EQ(ReportJson(a), ReportJson(b));
  ASSERT_EQ(a.samples(), 6);
  double mean = 0;
  for (double z : a.zncc) mean += z / 6;
  EXPECT_NEAR(a.mean_zncc, mean, 1e-6);
  EXPECT_TRUE(a.has_classification);
  for (double v : {a.ap_error, a.ap_success, a.fpr95}) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST_F(EvaluateTest, FusedWithIdentityWeightsEqualsRaw) {
  const attnet::ModelConfig c = Config(Task::kSemantic);
  const auto examples = attnet::LoadExamples(*root_, *manifest_, c);
  const MetricReport raw = EvaluateLoaded(examples, c, nullptr, Source::kRaw);
  const MetricReport fused = EvaluateExamples(examples, Task::kSemantic, [](const attnet::Example& e) {
    std::vector<Tensor> only = {e.uncertainties[0]};
    return attnet::FusedEstimate(Tensor(e.uncertainties[0].dims(), 1.0f), only);
  });
  EXPECT_EQ(raw.zncc, fused.zncc);
  EXPECT_EQ(raw.ap_error, fused.ap_error);
  EXPECT_EQ(raw.ap_success, fused.ap_success);
  EXPECT_EQ(raw.fpr95, fused.fpr95);
}

TEST_F(EvaluateTest, RegressionTargetReportsZnccOnly) {
  const MetricReport r =
      EvaluateDataset(*root_, *manifest_, Config(Task::kDepth), nullptr, Source::kRaw);
  EXPECT_FALSE(r.has_classification);
  const std::vector<std::string> keys = {"depth"};
  const std::string row = ReportCsvRow(keys, r);
  EXPECT_EQ(row.substr(row.size() - 4), ",,,\n");
  EXPECT_EQ(ReportCsvHeader(keys), "depth,samples,zncc,ap_err,ap_suc,fpr95\n");
}

TEST_F(EvaluateTest, MissingFileIsIoError) {
  const fs::path copy = fs::path(::testing::TempDir()) / "attnfuse_metrics_broken";
  fs::remove_all(copy);
  fs::copy(*root_, copy, fs::copy_options::recursive);
  fs::remove(synthworld::SampleFile(copy, manifest_->samples[2], "image"));
  EXPECT_THROW(EvaluateDataset(copy, *manifest_, Config(Task::kSemantic), nullptr, Source::kRaw),
               IoError);
}

}  // namespace
}  // namespace attnfuse::metrics
