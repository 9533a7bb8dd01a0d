// tests/cpc_test.cc

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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "predcode/cpc.h"
#include "predcode/errors.h"
#include "predcode/grad_check.h"
#include "predcode/synthetic.h"

namespace predcode {
namespace {

template <typename Real>
Matrix<Real> RandomInput(size_t t, size_t d, uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, scale);
  Matrix<Real> m(t, d);
  for (auto &v : m.values()) v = static_cast<Real>(n(rng));
  return m;
}

std::vector<double> RandomVec(size_t n, std::mt19937_64 *rng) {
  std::normal_distribution<double> g(0, 1);
  std::vector<double> v(n);
  for (auto &x : v) x = g(*rng);
  return v;
}

CpcConfig SmallConfig(CpcVariant variant, size_t n = 1, size_t negatives = 3) {
  CpcConfig c;
  c.input_dim = 4;
  c.encoder_width = 6;
  c.context_width = 5;
  c.n_steps = n;
  c.variant = variant;
  c.negatives = negatives;
  return c;
}

TEST(CpcEncoderTest, PermutationEquivariantAndNonNegative) {
  CpcModel<double> model(SmallConfig(CpcVariant::kN9Same), 1);
  auto x = RandomInput<double>(10, 4, 2);
  auto z = model.EncodeFrames(x);
  ASSERT_EQ(z.rows(), 10u);
  ASSERT_EQ(z.cols(), 6u);
  for (double v : z.values()) EXPECT_GE(v, 0.0);
  std::vector<size_t> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix<double> xp(10, 4);
  for (size_t i = 0; i < 10; ++i)
    std::copy(x.row(perm[i]).begin(), x.row(perm[i]).end(), xp.row(i).begin());
  auto zp = model.EncodeFrames(xp);
  for (size_t i = 0; i < 10; ++i)
    for (size_t e = 0; e < 6; ++e) EXPECT_EQ(zp(i, e), z(perm[i], e));
}

TEST(CpcEncoderTest, ZeroWeightsZeroOutputAndWidthCheck) {
  CpcModel<double> model(SmallConfig(CpcVariant::kN9Same), 1);
  for (auto &[name, p] : model.params()) p.value.SetZero();
  auto x = RandomInput<double>(5, 4, 2);
  const Matrix<double> z = model.EncodeFrames(x);
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
  const Matrix<double> c = model.ContextForward(z, 1);
  for (double v : c.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(model.EncodeFrames(Matrix<double>(5, 3)), DimensionError);
}

TEST(CpcContextTest, CausalAndTapsDiffer) {
  CpcModel<double> model(SmallConfig(CpcVariant::kCtxN9Same), 4);
  auto x = RandomInput<double>(12, 4, 5);
  auto c = model.Extract(x, FeatureTap::kContext);
  auto xp = x;
  xp(6, 1) += 1.0;
  auto cp = model.Extract(xp, FeatureTap::kContext);
  for (size_t t = 0; t < 6; ++t)
    for (size_t e = 0; e < c.cols(); ++e) ASSERT_EQ(cp(t, e), c(t, e));
  // Reversing the frame order commutes with the frame tap but not the context tap.
  Matrix<double> xr(12, 4);
  for (size_t t = 0; t < 12; ++t)
    std::copy(x.row(11 - t).begin(), x.row(11 - t).end(), xr.row(t).begin());
  auto z = model.Extract(x, FeatureTap::kFrame), zr = model.Extract(xr, FeatureTap::kFrame);
  auto cr = model.Extract(xr, FeatureTap::kContext);
  bool context_differs = false;
  for (size_t t = 0; t < 12; ++t)
    for (size_t e = 0; e < z.cols(); ++e) {
      EXPECT_EQ(zr(t, e), z(11 - t, e));
      if (e < c.cols()) context_differs |= cr(t, e) != c(11 - t, e);
    }
  EXPECT_TRUE(context_differs);
  EXPECT_EQ(model.Extract(x, FeatureTap::kContext), c);
}

TEST(CpcContextTest, ScalarHandRecurrence) {
  CpcConfig cfg = SmallConfig(CpcVariant::kCtxN9Same);
  cfg.encoder_width = 1;
  cfg.context_width = 1;
  CpcModel<double> model(cfg, 1);
  const double wx[4] = {0.4, 0.1, -0.3, 0.2}, wh[4] = {0.2, -0.5, 0.35, 0.1},
               b[4] = {0.0, 1.0, 0.05, -0.1};
  for (int k = 0; k < 4; ++k) {
    model.params().value("cpc.ctx.wx")(k, 0) = wx[k];
    model.params().value("cpc.ctx.wh")(k, 0) = wh[k];
    model.params().value("cpc.ctx.b")(0, k) = b[k];
  }
  Matrix<double> z{{0.5}, {1.2}, {0.0}};
  auto c = model.ContextForward(z, 1);
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  double h = 0, cell = 0;
  for (int t = 0; t < 3; ++t) {
    const double zt = z(t, 0);
    const double i = sig(wx[0] * zt + wh[0] * h + b[0]);
    const double f = sig(wx[1] * zt + wh[1] * h + b[1]);
    const double g = std::tanh(wx[2] * zt + wh[2] * h + b[2]);
    const double o = sig(wx[3] * zt + wh[3] * h + b[3]);
    cell = f * cell + i * g;
    h = o * std::tanh(cell);
    EXPECT_NEAR(c(t, 0), h, 1e-10);
  }
}

TEST(CpcLossTest, UniformScoresGiveLogCandidates) {
  std::mt19937_64 rng(6);
  for (size_t k : {1u, 9u, 1023u}) {
    Matrix<double> w(8, 5);
    auto c = RandomVec(5, &rng), pos = RandomVec(8, &rng);
    std::vector<std::vector<double>> negs;
    for (size_t j = 0; j < k; ++j) negs.push_back(RandomVec(8, &rng));
    EXPECT_NEAR(CpcLoss(c, pos, negs, w), std::log(static_cast<double>(k + 1)), 1e-9) << k;
  }
  EXPECT_NEAR(std::log(10.0), 2.302585, 1e-6);
}

TEST(CpcLossTest, TwoCandidateHandValue) {
  const double logits[2] = {1.0, 0.0};
  EXPECT_NEAR(SoftmaxCrossEntropy(logits, 0), 0.313262, 1e-6);
  // The same through the bilinear score: z^T W c with W = [1], c = [1].
  Matrix<double> w{{1.0}};
  EXPECT_NEAR(CpcLoss(std::vector<double>{1.0}, std::vector<double>{1.0},
                      {std::vector<double>{0.0}}, w),
              0.313262, 1e-6);
}

TEST(CpcLossTest, DominantPositiveApproachesZeroAndStaysFinite) {
  const double big[3] = {1e4, 0.0, -3.0};
  const double loss = SoftmaxCrossEntropy(big, 0);
  EXPECT_GE(loss, 0.0);
  EXPECT_LT(loss, 1e-12);
  const double huge[2] = {-1e308, 1e308};
  EXPECT_TRUE(std::isfinite(SoftmaxCrossEntropy(huge, 1)));
}

TEST(CpcLossTest, EmptyNegativesRejected) {
  Matrix<double> w(2, 2);
  EXPECT_THROW(CpcLoss(std::vector<double>{1, 1}, std::vector<double>{1, 1}, {}, w),
               EmptyInputError);
}

TEST(CpcLossTest, NegativeOrderDoesNotMatter) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix<double> w = RandomInput<double>(6, 4, rng());
    auto c = RandomVec(4, &rng), pos = RandomVec(6, &rng);
    std::vector<std::vector<double>> negs;
    for (int j = 0; j < 9; ++j) negs.push_back(RandomVec(6, &rng));
    const double base = CpcLoss(c, pos, negs, w);
    std::shuffle(negs.begin(), negs.end(), rng);
    EXPECT_EQ(CpcLoss(c, pos, negs, w), base);
  }
}

TEST(NegativeSamplerTest, WithinUtteranceNeverReturnsTarget) {
  NegativeSampler s(NegativeStrategy::kWithinUtterance, 1, 9);
  const size_t lengths[3] = {20, 7, 13};
  std::mt19937_64 rng(10);
  size_t draws = 0;
  std::set<size_t> seen;
  while (draws < 10000) {
    const size_t utt = rng() % 3, step = 1 + rng() % 3;
    const size_t t = rng() % (lengths[utt] - step);
    for (const FrameRef &f : s.Sample(lengths, {utt, t}, step)) {
      ASSERT_EQ(f.utt, utt);
      ASSERT_NE(f.time, t + step);
      ASSERT_LT(f.time, lengths[utt]);
      if (utt == 1) seen.insert(f.time);
      ++draws;
    }
  }
  EXPECT_GE(seen.size(), 6u);  // all positions but the excluded target show up
}

TEST(NegativeSamplerTest, WithinBatchNeedsAnotherUtterance) {
  NegativeSampler s(NegativeStrategy::kWithinBatch, 9, 1);
  const size_t one[1] = {30};
  EXPECT_THROW(s.Sample(one, {0, 0}, 1), SamplingError);
  const size_t lengths[3] = {10, 4, 6};
  for (int i = 0; i < 1000; ++i)
    for (const FrameRef &f : s.Sample(lengths, {1, 1}, 2)) {
      ASSERT_NE(f.utt, 1u);
      ASSERT_LT(f.time, lengths[f.utt]);
    }
  NegativeSampler u(NegativeStrategy::kWithinUtterance, 9, 1);
  const size_t tiny[1] = {1};
  EXPECT_THROW(u.Sample(tiny, {0, 0}, 1), SamplingError);
}

TEST(NegativeSamplerTest, ExhaustiveCount) {
  NegativeSampler s(NegativeStrategy::kExhaustiveBatch, 0, 1);
  std::vector<size_t> lengths(8, 128);
  EXPECT_EQ(s.Sample(lengths, {3, 50}, 1).size(), 1023u);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<size_t> ls(1 + rng() % 6);
    for (auto &l : ls) l = 2 + rng() % 40;
    const size_t total = std::accumulate(ls.begin(), ls.end(), size_t{0});
    const size_t utt = rng() % ls.size();
    auto negs = s.Sample(ls, {utt, 0}, 1);
    EXPECT_EQ(negs.size(), total - 1);
    EXPECT_EQ(std::count(negs.begin(), negs.end(), FrameRef{utt, 1}), 0);
  }
}

TEST(NegativeSamplerTest, SeededDrawsRepeat) {
  const size_t lengths[2] = {15, 15};
  NegativeSampler a(NegativeStrategy::kWithinUtterance, 9, 77);
  NegativeSampler b(NegativeStrategy::kWithinUtterance, 9, 77);
  for (int i = 0; i < 20; ++i)
    EXPECT_EQ(a.Sample(lengths, {0, 3}, 2), b.Sample(lengths, {0, 3}, 2));
}

TEST(CpcExhaustTest, ZeroScorersGiveStepsTimesLogCandidates) {
  CpcConfig cfg = SmallConfig(CpcVariant::kCtxExhaust, 3);
  CpcModel<double> model(cfg, 2);
  for (size_t s = 0; s < 3; ++s) model.params().value(CpcModel<double>::ScorerName(s)).SetZero();
  auto x = RandomInput<double>(8 * 128, 4, 3);
  std::vector<size_t> lengths(8, 128);
  const double loss = CpcBatchLoss(&model, x, 8, lengths, {}, false);
  EXPECT_NEAR(loss, 3 * std::log(1024.0), 1e-9);
}

TEST(CpcExhaustTest, SingleStepSumIsTheStepLoss) {
  CpcModel<double> model(SmallConfig(CpcVariant::kCtxExhaust, 1), 2);
  auto x = RandomInput<double>(3 * 10, 4, 4);
  std::vector<size_t> lengths{10, 10, 10};
  const double total = CpcBatchLoss(&model, x, 3, lengths, {}, false);
  auto fwd = model.Forward(x, 3);
  const double step =
      ExhaustiveStepLoss<double>(&model, fwd, lengths, 1, 0, false, nullptr, nullptr);
  EXPECT_EQ(total, step);
}

TEST(CpcExhaustTest, MatchesPerAnchorReference) {
  // Each anchor's loss equals CpcLoss with every other valid frame as a negative.
  CpcModel<double> model(SmallConfig(CpcVariant::kCtxExhaust, 2), 5);
  const size_t batch = 2;
  std::vector<size_t> lengths{6, 4};
  Matrix<double> x(6 * batch, 4);
  auto src = RandomInput<double>(6 * batch, 4, 6);
  for (size_t t = 0; t < 6; ++t)
    for (size_t b = 0; b < batch; ++b)
      if (t < lengths[b])
        std::copy(src.row(t * batch + b).begin(), src.row(t * batch + b).end(),
                  x.row(t * batch + b).begin());
  auto fwd = model.Forward(x, batch);
  const auto &w = model.params().value(CpcModel<double>::ScorerName(1));
  double ref = 0;
  size_t anchors = 0;
  for (size_t b = 0; b < batch; ++b)
    for (size_t t = 0; t + 2 < lengths[b]; ++t) {
      std::vector<std::vector<double>> negs;
      for (size_t b2 = 0; b2 < batch; ++b2)
        for (size_t t2 = 0; t2 < lengths[b2]; ++t2)
          if (!(b2 == b && t2 == t + 2)) {
            auto r = fwd.z.row(t2 * batch + b2);
            negs.emplace_back(r.begin(), r.end());
          }
      auto cr = fwd.c.row(t * batch + b);
      auto pr = fwd.z.row((t + 2) * batch + b);
      ref += CpcLoss(std::vector<double>(cr.begin(), cr.end()),
                     std::vector<double>(pr.begin(), pr.end()), negs, w);
      ++anchors;
    }
  const double got =
      ExhaustiveStepLoss<double>(&model, fwd, lengths, 2, 1, false, nullptr, nullptr);
  EXPECT_NEAR(got, ref / anchors, 1e-12);
}

class CpcGradTest : public ::testing::TestWithParam<CpcVariant> {};

TEST_P(CpcGradTest, FiniteDifferencesAgree) {
  const CpcVariant variant = GetParam();
  CpcConfig cfg = SmallConfig(variant, variant == CpcVariant::kCtxExhaust ? 2 : 1, 3);
  const uint64_t seed = 20;
  CpcModel<double> model(cfg, seed);
  // Positive encoder biases keep units away from the ReLU kink and larger
  // scorer weights move the softmax off uniform, so no probed coordinate has
  // a gradient below the finite-difference noise floor.
  for (const char *b : {"cpc.enc1.b", "cpc.enc2.b", "cpc.enc3.b"})
    for (auto &v : model.params().value(b).values()) v = 0.5;
  for (size_t s = 0; s < cfg.num_scorers(); ++s)
    for (auto &v : model.params().value(CpcModel<double>::ScorerName(s)).values()) v *= 4.0;
  const size_t batch = 3;
  std::vector<size_t> lengths{8, 6, 7};
  Matrix<double> x(8 * batch, 4);
  auto src = RandomInput<double>(8 * batch, 4, seed + 1, 2.0);
  for (size_t t = 0; t < 8; ++t)
    for (size_t b = 0; b < batch; ++b)
      if (t < lengths[b])
        std::copy(src.row(t * batch + b).begin(), src.row(t * batch + b).end(),
                  x.row(t * batch + b).begin());
  NegativeSampler sampler(StrategyFor(variant), 3, seed + 2);
  std::vector<AnchorPlan> plan;
  if (variant != CpcVariant::kCtxExhaust) plan = PlanAnchors(lengths, cfg.n_steps, &sampler);
  auto fn = [&]() { return CpcBatchLoss(&model, x, batch, lengths, plan, true); };
  GradCheckResult r = GradCheck(fn, &model.params(), 80, 1e-5, seed + 3);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst_parameter << "[" << r.worst_index << "] "
                                        << r.worst_analytic << " vs " << r.worst_numeric;
}

INSTANTIATE_TEST_SUITE_P(Variants, CpcGradTest,
                         ::testing::Values(CpcVariant::kN9All, CpcVariant::kN9Same,
                                           CpcVariant::kCtxN9Same, CpcVariant::kCtxExhaust));

TEST(CpcGradTest, EveryParameterReceivesGradient) {
  CpcModel<double> model(SmallConfig(CpcVariant::kN9Same), 30);
  auto x = RandomInput<double>(10, 4, 31);
  std::vector<size_t> lengths{10};
  NegativeSampler sampler(NegativeStrategy::kWithinUtterance, 3, 32);
  auto plan = PlanAnchors(lengths, 1, &sampler);
  model.params().ZeroGrad();
  CpcBatchLoss(&model, x, 1, lengths, plan, true);
  for (const auto &[name, p] : model.params()) {
    double norm = 0;
    for (double g : p.grad.values()) norm += g * g;
    EXPECT_GT(norm, 0.0) << name;
  }
}

TEST(CpcVariantTest, VariantsSelectStrategyAndTap) {
  EXPECT_EQ(StrategyFor(CpcVariant::kN9All), NegativeStrategy::kWithinBatch);
  EXPECT_EQ(StrategyFor(CpcVariant::kN9Same), NegativeStrategy::kWithinUtterance);
  EXPECT_EQ(StrategyFor(CpcVariant::kCtxN9Same), NegativeStrategy::kWithinUtterance);
  EXPECT_EQ(StrategyFor(CpcVariant::kCtxExhaust), NegativeStrategy::kExhaustiveBatch);
  EXPECT_EQ(TapFor(CpcVariant::kN9Same), FeatureTap::kFrame);
  EXPECT_EQ(TapFor(CpcVariant::kCtxN9Same), FeatureTap::kContext);
  for (CpcVariant v : {CpcVariant::kN9All, CpcVariant::kN9Same, CpcVariant::kCtxN9Same,
                       CpcVariant::kCtxExhaust})
    EXPECT_EQ(ParseVariant(VariantName(v)), v);
  EXPECT_THROW(ParseVariant("n10"), ConfigError);
  CpcConfig c = SmallConfig(CpcVariant::kCtxExhaust, 4);
  EXPECT_EQ(c.num_scorers(), 4u);
  CpcConfig back = CpcConfig::FromKeyValues(c.ToKeyValues());
  EXPECT_EQ(back.variant, CpcVariant::kCtxExhaust);
  EXPECT_EQ(back.n_steps, 4u);
  EXPECT_EQ(back.encoder_width, 6u);
}

SyntheticCorpus SmallSynth() {
  SynthConfig sc;
  sc.n_speakers = 4;
  sc.utterances_per_speaker = 4;
  sc.frames_per_utterance = 40;
  sc.feature_dim = 8;
  sc.seed = 3;
  return GenerateSyntheticCorpus(sc);
}

TEST(CpcTrainTest, InitialLossNearLogCandidatesAndDecreases) {
  auto synth = SmallSynth();
  CpcConfig cfg = SmallConfig(CpcVariant::kN9Same, 2, 9);
  cfg.input_dim = 8;
  cfg.encoder_width = 32;
  cfg.context_width = 32;
  CpcTrainConfig tc;
  tc.epochs = 30;
  tc.batch_size = 4;
  tc.learning_rate = 3e-3;
  tc.seed = 4;
  auto a = TrainCpc<float>(synth.corpus.utterances, cfg, tc);
  EXPECT_NEAR(a.loss_history.front(), std::log(10.0), 0.1);
  EXPECT_LT(a.loss_history.back(), a.loss_history.front());
  auto b = TrainCpc<float>(synth.corpus.utterances, cfg, tc);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_TRUE(a.model.params().ValuesEqual(b.model.params()));
}

TEST(CpcTrainTest, ExhaustVariantTrainsOnChunks) {
  auto synth = SmallSynth();
  CpcConfig cfg = SmallConfig(CpcVariant::kCtxExhaust, 2);
  cfg.input_dim = 8;
  cfg.encoder_width = 16;
  cfg.context_width = 16;
  CpcTrainConfig tc;
  tc.epochs = 15;
  tc.exhaust_batch_size = 8;
  tc.chunk_length = 32;
  tc.learning_rate = 3e-3;
  auto r = TrainCpc<float>(synth.corpus.utterances, cfg, tc);
  EXPECT_LT(r.loss_history.back(), r.loss_history.front());
  EXPECT_LT(r.loss_history.front(), 2 * std::log(256.0) + 0.1);
  tc.chunk_length = 64;
  EXPECT_THROW(TrainCpc<float>(synth.corpus.utterances, cfg, tc), ContractError);
  tc.pad_short_chunks = true;
  tc.epochs = 1;
  EXPECT_NO_THROW(TrainCpc<float>(synth.corpus.utterances, cfg, tc));
}

TEST(CpcTrainTest, ShortUtteranceRejectedById) {
  auto synth = SmallSynth();
  auto corpus = synth.corpus.utterances;
  corpus[2].frames = Matrix<float>(2, 8);
  corpus[2].phone_labels.reset();
  CpcConfig cfg = SmallConfig(CpcVariant::kN9Same, 1);
  cfg.input_dim = 8;
  try {
    TrainCpc<float>(corpus, cfg, CpcTrainConfig{});
    FAIL();
  } catch (const ContractError &e) {
    EXPECT_NE(std::string(e.what()).find(corpus[2].utterance_id), std::string::npos);
  }
}

}  // namespace
}  // namespace predcode
