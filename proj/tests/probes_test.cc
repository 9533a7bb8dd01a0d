// tests/probes_test.cc

// Copyright 2026  The predcode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "predcode/errors.h"
#include "predcode/grad_check.h"
#include "predcode/probes.h"

namespace predcode {
namespace {

// Gaussian blobs around well-spread class means.
ProbeDataset Blobs(size_t per_class, size_t classes, size_t dim, double spread, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 1);
  std::vector<std::vector<double>> means(classes, std::vector<double>(dim));
  for (auto &m : means)
    for (auto &v : m) v = 3.0 * n(rng);
  ProbeDataset d;
  d.features.Resize(per_class * classes, dim);
  for (size_t i = 0; i < per_class * classes; ++i) {
    const size_t c = i % classes;
    d.labels.push_back(static_cast<int32_t>(c));
    for (size_t k = 0; k < dim; ++k)
      d.features(i, k) = static_cast<float>(means[c][k] + spread * n(rng));
  }
  return d;
}

double Accuracy(const Classifier<float> &p, const ProbeDataset &d) {
  return 1.0 - FrameErrorRate(p, d);
}

TEST(ProbeTest, SeparableTwoClassReachesFullAccuracy) {
  ProbeDataset d;
  d.features.Resize(200, 2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (size_t i = 0; i < 200; ++i) {
    const int32_t c = static_cast<int32_t>(i % 2);
    const double sign = c ? 1.0 : -1.0;
    d.features(i, 0) = static_cast<float>(sign * u(rng));
    d.features(i, 1) = static_cast<float>(u(rng) - 1.1);
    d.labels.push_back(c);
  }
  ProbeTrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 32;
  cfg.learning_rate = 1e-2;
  auto probe = TrainProbe<float>(d, nullptr, ProbeKind::kLinear, 2, cfg);
  EXPECT_EQ(Accuracy(probe, d), 1.0);
}

TEST(ProbeTest, ShuffledLabelsGiveChanceOnHeldOut) {
  const size_t classes = 4;
  ProbeDataset train = Blobs(500, classes, 6, 1.0, 2), test = Blobs(500, classes, 6, 1.0, 3);
  std::mt19937_64 rng(4);
  std::shuffle(train.labels.begin(), train.labels.end(), rng);
  std::shuffle(test.labels.begin(), test.labels.end(), rng);
  ProbeTrainConfig cfg;
  cfg.epochs = 20;
  auto probe = TrainProbe<float>(train, nullptr, ProbeKind::kLinear, classes, cfg);
  EXPECT_NEAR(Accuracy(probe, test), 1.0 / classes, 0.05);
}

TEST(ProbeTest, SameSeedSameWeights) {
  ProbeDataset d = Blobs(50, 3, 5, 1.0, 5), dev = Blobs(10, 3, 5, 1.0, 6);
  ProbeTrainConfig cfg;
  cfg.epochs = 5;
  cfg.hidden_width = 16;
  cfg.seed = 9;
  for (ProbeKind kind : {ProbeKind::kLinear, ProbeKind::kMlp1, ProbeKind::kMlp3}) {
    auto a = TrainProbe<float>(d, &dev, kind, 3, cfg);
    auto b = TrainProbe<float>(d, &dev, kind, 3, cfg);
    EXPECT_TRUE(a.params().ValuesEqual(b.params())) << ProbeKindName(kind);
  }
}

TEST(ProbeTest, LayerCounts) {
  EXPECT_EQ(Classifier<float>(ProbeKind::kLinear, 5, 3, 512, 1).params().size(), 2u);
  Classifier<float> mlp1(ProbeKind::kMlp1, 5, 3, 512, 1);
  EXPECT_EQ(mlp1.params().size(), 4u);
  EXPECT_EQ(mlp1.params().value("probe.l1.w").rows(), 512u);
  EXPECT_EQ(Classifier<float>(ProbeKind::kMlp3, 5, 3, 512, 1).params().size(), 8u);
  EXPECT_EQ(ParseProbeKind("mlp3"), ProbeKind::kMlp3);
  EXPECT_THROW(ParseProbeKind("mlp2"), ConfigError);
}

TEST(FrameErrorRateTest, PerfectAndConstantProbes) {
  const size_t classes = 5;
  ProbeDataset d;
  d.features.Resize(100, classes);
  for (size_t i = 0; i < 100; ++i) {
    d.labels.push_back(static_cast<int32_t>(i % classes));
    d.features(i, i % classes) = 1.0f;
  }
  Classifier<float> perfect(ProbeKind::kLinear, classes, classes, 0, 1);
  auto &w = perfect.params().value("probe.l1.w");
  w.SetZero();
  for (size_t c = 0; c < classes; ++c) w(c, c) = 1.0f;
  perfect.params().value("probe.l1.b").SetZero();
  EXPECT_EQ(FrameErrorRate(perfect, d), 0.0);

  // All-zero classifier: every logit ties, so argmax is class 0 everywhere.
  Classifier<float> constant(ProbeKind::kLinear, classes, classes, 0, 1);
  for (auto &[name, p] : constant.params()) p.value.SetZero();
  EXPECT_DOUBLE_EQ(FrameErrorRate(constant, d), (classes - 1.0) / classes);
  for (int32_t p : constant.Predict(d.features)) EXPECT_EQ(p, 0);
}

TEST(FrameErrorRateTest, RangeAndErrors) {
  ProbeDataset d = Blobs(30, 3, 4, 2.0, 7);
  Classifier<float> p(ProbeKind::kMlp1, 4, 3, 8, 2);
  const double fer = FrameErrorRate(p, d);
  EXPECT_GE(fer, 0.0);
  EXPECT_LE(fer, 1.0);
  ProbeDataset empty;
  empty.features.Resize(0, 4);
  EXPECT_THROW(FrameErrorRate(p, empty), EmptyInputError);
  ProbeDataset bad = d;
  bad.labels[3] = 3;
  EXPECT_THROW(TrainProbe<float>(bad, nullptr, ProbeKind::kLinear, 3, ProbeTrainConfig{}),
               ContractError);
  EXPECT_THROW(TrainProbe<float>(empty, nullptr, ProbeKind::kLinear, 3, ProbeTrainConfig{}),
               EmptyInputError);
}

class ProbeGradTest : public ::testing::TestWithParam<ProbeKind> {};

TEST_P(ProbeGradTest, FiniteDifferencesAgree) {
  Classifier<double> probe(GetParam(), 5, 4, 7, 11);
  for (auto &[name, p] : probe.params())
    if (name.ends_with(".b"))
      for (auto &v : p.value.values()) v = 0.3;
  ProbeDataset d = Blobs(6, 4, 5, 1.0, 12);
  Matrix<double> x = Cast<double>(d.features);
  auto fn = [&]() { return probe.Loss(x, d.labels, true); };
  GradCheckResult r = GradCheck(fn, &probe.params(), 60, 1e-5, 13);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst_parameter << "[" << r.worst_index << "]";
}

INSTANTIATE_TEST_SUITE_P(Kinds, ProbeGradTest,
                         ::testing::Values(ProbeKind::kLinear, ProbeKind::kMlp1, ProbeKind::kMlp3));

TEST(ProbeTest, InvertibleAffineMapKeepsTrainingAccuracy) {
  ProbeDataset d = Blobs(150, 4, 3, 2.5, 14);
  // x' = A x + b with a well-conditioned A.
  const double a[3][3] = {{1.5, 0.3, 0.0}, {-0.2, 0.8, 0.4}, {0.1, 0.0, 1.2}};
  const double b[3] = {0.5, -1.0, 2.0};
  ProbeDataset mapped = d;
  for (size_t i = 0; i < d.size(); ++i)
    for (size_t r = 0; r < 3; ++r) {
      double v = b[r];
      for (size_t c = 0; c < 3; ++c) v += a[r][c] * d.features(i, c);
      mapped.features(i, r) = static_cast<float>(v);
    }
  ProbeTrainConfig cfg;
  cfg.epochs = 150;
  cfg.batch_size = 64;
  cfg.learning_rate = 1e-2;
  auto p1 = TrainProbe<float>(d, nullptr, ProbeKind::kLinear, 4, cfg);
  auto p2 = TrainProbe<float>(mapped, nullptr, ProbeKind::kLinear, 4, cfg);
  EXPECT_LT(std::abs(Accuracy(p1, d) - Accuracy(p2, mapped)), 0.01);
}

TEST(ProbeTest, EarlyStoppingKeepsBestDevEpoch) {
  ProbeDataset d = Blobs(100, 3, 4, 1.5, 15), dev = Blobs(30, 3, 4, 1.5, 15);
  ProbeTrainConfig cfg;
  cfg.epochs = 50;
  cfg.patience = 3;
  ProbeTrainStats stats;
  auto probe = TrainProbe<float>(d, &dev, ProbeKind::kLinear, 3, cfg, &stats);
  EXPECT_LE(stats.epochs_run, 50u);
  EXPECT_LE(stats.best_epoch + 1, stats.epochs_run);
  EXPECT_DOUBLE_EQ(Accuracy(probe, dev), stats.best_dev_accuracy);
}

}  // namespace
}  // namespace predcode
