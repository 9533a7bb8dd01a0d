// tests/acceptance.cc

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

// Acceptance driver: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.  All runs are seeded and deterministic.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "predcode/apc.h"
#include "predcode/checkpoint.h"
#include "predcode/corpus.h"
#include "predcode/cpc.h"
#include "predcode/errors.h"
#include "predcode/frontend.h"
#include "predcode/grad_check.h"
#include "predcode/pipeline.h"
#include "predcode/probes.h"
#include "predcode/speaker.h"
#include "predcode/synthetic.h"

namespace predcode {
namespace {

// Accumulates sub-check outcomes for one criterion.
class Verdict {
 public:
  void Check(bool ok, const std::string &what) {
    if (!ok) {
      pass_ = false;
      failures_.push_back(what);
    }
  }
  void Note(const std::string &s) { notes_.push_back(s); }
  bool pass() const { return pass_; }
  std::string Summary() const {
    std::ostringstream os;
    for (size_t i = 0; i < notes_.size(); ++i) os << (i ? "; " : "") << notes_[i];
    for (const auto &f : failures_) os << (os.tellp() > 0 ? "; " : "") << "failed: " << f;
    return os.str();
  }

 private:
  bool pass_ = true;
  std::vector<std::string> notes_, failures_;
};

std::string Fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

std::string Sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

template <typename Real>
Matrix<Real> RandomInput(size_t t, size_t d, uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, scale);
  Matrix<Real> m(t, d);
  for (auto &v : m.values()) v = static_cast<Real>(n(rng));
  return m;
}

// Time-major padded batch with zeros beyond each length.
Matrix<double> PaddedInput(const std::vector<size_t> &lengths, size_t d, uint64_t seed,
                           double scale) {
  const size_t batch = lengths.size();
  const size_t t_max = *std::max_element(lengths.begin(), lengths.end());
  Matrix<double> src = RandomInput<double>(t_max * batch, d, seed, scale), x(t_max * batch, d);
  for (size_t t = 0; t < t_max; ++t)
    for (size_t b = 0; b < batch; ++b)
      if (t < lengths[b])
        std::copy(src.row(t * batch + b).begin(), src.row(t * batch + b).end(),
                  x.row(t * batch + b).begin());
  return x;
}

ApcConfig TinyApc(size_t layers) {
  ApcConfig c;
  c.input_dim = 4;
  c.hidden = 6;
  c.layers = layers;
  return c;
}

CpcConfig TinyCpc(CpcVariant variant, size_t n) {
  CpcConfig c;
  c.input_dim = 4;
  c.encoder_width = 6;
  c.context_width = 5;
  c.n_steps = n;
  c.variant = variant;
  c.negatives = 3;
  return c;
}

double ApcLossAndGrad(ApcModel<double> *model, const Matrix<double> &x, size_t batch,
                      std::span<const size_t> lengths, size_t n) {
  auto fwd = model->Forward(x, batch);
  Matrix<double> dy;
  MaskedLoss l = ApcBatchL1<double>(x, fwd.predictions, batch, lengths, n, 1.0, &dy);
  model->Backward(fwd, dy);
  return l.sum;
}

const double kGradTolerance = 1e-4;
const double kGradEps = 1e-5;
const size_t kGradProbes = 60;

void CheckGrad(Verdict *v, const std::string &name, const std::function<double()> &fn,
               ParamStore<double> *params, uint64_t seed, double *worst,
               std::string *worst_name) {
  GradCheckResult r = GradCheck(fn, params, kGradProbes, kGradEps, seed);
  if (r.max_relative_error >= *worst) {
    *worst = r.max_relative_error;
    *worst_name = name;
  }
  v->Check(r.probes >= 50 && r.max_relative_error < kGradTolerance,
           name + " rel err " + Sci(r.max_relative_error) + " at " + r.worst_parameter);
}

Verdict GradientCorrectness() {
  Verdict v;
  double worst = 0;
  std::string worst_name;
  for (size_t layers = 1; layers <= 3; ++layers) {
    ApcModel<double> model(TinyApc(layers), 10 + layers);
    std::vector<size_t> lengths{12, 7, 9};
    Matrix<double> x = PaddedInput(lengths, 4, 11 + layers, 1.0);
    auto fn = [&]() { return ApcLossAndGrad(&model, x, lengths.size(), lengths, 2); };
    CheckGrad(&v, "apc " + std::to_string(layers) + "-layer", fn, &model.params(), 12, &worst,
              &worst_name);
  }
  for (CpcVariant variant : {CpcVariant::kN9All, CpcVariant::kN9Same, CpcVariant::kCtxN9Same,
                             CpcVariant::kCtxExhaust}) {
    CpcConfig cfg = TinyCpc(variant, variant == CpcVariant::kCtxExhaust ? 2 : 1);
    CpcModel<double> model(cfg, 20);
    // Offsets keep units away from the ReLU kink and larger scorer weights
    // move the softmax off uniform, above the finite-difference noise floor.
    for (const char *b : {"cpc.enc1.b", "cpc.enc2.b", "cpc.enc3.b"})
      for (auto &p : model.params().value(b).values()) p = 0.5;
    for (size_t s = 0; s < cfg.num_scorers(); ++s)
      for (auto &p : model.params().value(CpcModel<double>::ScorerName(s)).values()) p *= 4.0;
    std::vector<size_t> lengths{8, 6, 7};
    Matrix<double> x = PaddedInput(lengths, 4, 21, 2.0);
    NegativeSampler sampler(StrategyFor(variant), 3, 22);
    std::vector<AnchorPlan> plan;
    if (variant != CpcVariant::kCtxExhaust) plan = PlanAnchors(lengths, cfg.n_steps, &sampler);
    auto fn = [&]() { return CpcBatchLoss(&model, x, lengths.size(), lengths, plan, true); };
    CheckGrad(&v, "cpc " + VariantName(variant), fn, &model.params(), 23, &worst, &worst_name);
  }
  std::mt19937_64 rng(30);
  for (ProbeKind kind : {ProbeKind::kLinear, ProbeKind::kMlp1, ProbeKind::kMlp3}) {
    Classifier<double> probe(kind, 5, 4, 7, 31);
    for (auto &[name, p] : probe.params())
      if (name.ends_with(".b"))
        for (auto &val : p.value.values()) val = 0.3;
    Matrix<double> x = RandomInput<double>(24, 5, 32);
    std::vector<int32_t> labels(24);
    for (auto &l : labels) l = static_cast<int32_t>(rng() % 4);
    auto fn = [&]() { return probe.Loss(x, labels, true); };
    CheckGrad(&v, "probe " + ProbeKindName(kind), fn, &probe.params(), 33, &worst, &worst_name);
  }
  v.Note("10 models, " + std::to_string(kGradProbes) + " coordinates each, max rel err " +
         Sci(worst) + " (" + worst_name + ")");
  return v;
}

Verdict AnalyticAnchors() {
  Verdict v;
  std::mt19937_64 rng(40);
  std::normal_distribution<double> n(0, 1);
  auto vec = [&](size_t d) {
    std::vector<double> out(d);
    for (auto &x : out) x = n(rng);
    return out;
  };
  Matrix<double> w_zero(8, 8);
  double worst = 0;
  for (size_t k : {1u, 9u, 1023u}) {
    std::vector<std::vector<double>> negs;
    for (size_t j = 0; j < k; ++j) negs.push_back(vec(8));
    const double err = std::abs(CpcLoss(vec(8), vec(8), negs, w_zero) -
                                std::log(static_cast<double>(k + 1)));
    worst = std::max(worst, err);
    v.Check(err <= 1e-9, "cpc k=" + std::to_string(k) + " off by " + Sci(err));
  }
  Matrix<double> x{{1}, {2}, {4}}, y{{1.5}, {3}, {0}};
  const double hand = ApcL1Loss(x, y, 1);
  v.Check(std::abs(hand - 1.5) < 1e-12, "apc hand example gave " + Fmt(hand, 12));
  double naive_gap = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t t = 2 + rng() % 30, d = 1 + rng() % 6, steps = 1 + rng() % (t - 1);
    auto a = RandomInput<double>(t, d, rng()), b = RandomInput<double>(t, d, rng());
    double naive = 0;
    for (size_t i = 0; i + steps < t; ++i)
      for (size_t c = 0; c < d; ++c) naive += std::abs(a(i + steps, c) - b(i, c));
    naive_gap = std::max(naive_gap, std::abs(ApcL1Loss(a, b, steps) - naive));
  }
  v.Check(naive_gap <= 1e-6, "apc vectorized vs naive gap " + Sci(naive_gap));
  v.Note("cpc |loss - ln(k+1)| <= " + Sci(worst) + ", apc hand " + Fmt(hand, 6) +
         ", naive gap " + Sci(naive_gap));
  return v;
}

// Direct O(N^2) sweep: every distinct score as a threshold, first minimum gap.
EerResult BruteForceEer(const std::vector<double> &tar, const std::vector<double> &non) {
  std::vector<double> thr(tar);
  thr.insert(thr.end(), non.begin(), non.end());
  std::sort(thr.begin(), thr.end());
  thr.erase(std::unique(thr.begin(), thr.end()), thr.end());
  EerResult best;
  double gap = 2.0;
  for (double t : thr) {
    size_t fa = 0, fr = 0;
    for (double s : non) fa += s >= t;
    for (double s : tar) fr += s < t;
    const double far = static_cast<double>(fa) / non.size();
    const double frr = static_cast<double>(fr) / tar.size();
    if (std::abs(far - frr) < gap) {
      gap = std::abs(far - frr);
      best.eer = (far + frr) / 2;
      best.threshold = t;
    }
  }
  return best;
}

Verdict MetricOracles() {
  Verdict v;
  std::mt19937_64 rng(50);
  std::normal_distribution<double> n(0, 1);
  size_t mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t total = 2 + rng() % 999;
    const size_t nt = 1 + rng() % (total - 1), nn = total - nt;
    const bool coarse = trial % 3 == 0;
    std::vector<double> tar(nt), non(nn);
    for (auto &s : tar) s = coarse ? std::round(4 * (n(rng) + 1)) / 4 : n(rng) + 1;
    for (auto &s : non) s = coarse ? std::round(4 * n(rng)) / 4 : n(rng);
    const EerResult a = ComputeEer(tar, non), b = BruteForceEer(tar, non);
    mismatches += a.eer != b.eer || a.threshold != b.threshold;
  }
  v.Check(mismatches == 0, std::to_string(mismatches) + " of 100 sets differ from brute force");
  const double separated = ComputeEer(std::vector<double>{0.9, 0.8, 0.7},
                                      std::vector<double>{0.2, 0.1}).eer;
  v.Check(separated == 0.0, "separated set eer " + Fmt(separated));
  const double worked = ComputeEer(std::vector<double>{0.9, 0.8},
                                   std::vector<double>{0.95, 0.1}).eer;
  v.Check(worked == 0.5, "worked example eer " + Fmt(worked));
  v.Note("100 random sets exact, separated " + Fmt(separated, 1) + ", worked " + Fmt(worked, 1));
  return v;
}

// Shared runs: the default corpus and the single-layer model trained on it.
struct SharedRuns {
  Corpus corpus;                   // default synthetic, pooled normalization
  ApcTrainResult<float> apc{ApcModel<float>(ApcConfig{}, 0), {}};
  double apc_probe_accuracy = 0.0;
  double copy_loss = 0.0;
};

const size_t kHidden = 64;
const size_t kSteps = 2;
const size_t kEpochs = 20;
const double kLearningRate = 3e-3;

Corpus NormalizedSynthetic(const SynthConfig &sc) {
  SyntheticCorpus synth = GenerateSyntheticCorpus(sc);
  SpeakerNormalize(&synth.corpus.utterances, NormScope::kGlobal);
  return synth.corpus;
}

ApcTrainResult<float> TrainReferenceApc(const Corpus &corpus, size_t layers) {
  ApcConfig mc;
  mc.input_dim = corpus.utterances.front().dim();
  mc.hidden = kHidden;
  mc.layers = layers;
  ApcTrainConfig tc;
  tc.n_steps = kSteps;
  tc.epochs = kEpochs;
  tc.learning_rate = kLearningRate;
  return TrainApc<float>(corpus.utterances, mc, tc);
}

double LinearProbeAccuracy(const std::vector<FeatureSequence> &feats) {
  return 1.0 - RunPhoneProbe(feats, ProbeKind::kLinear, ProbeTrainConfig{}, 1).test_error_rate;
}

Verdict RepresentationBeatsSurface(SharedRuns *shared) {
  Verdict v;
  shared->corpus = NormalizedSynthetic(SynthConfig{});
  const double raw = LinearProbeAccuracy(shared->corpus.utterances);
  shared->apc = TrainReferenceApc(shared->corpus, 1);
  shared->copy_loss = CopyPredictorLoss(shared->corpus.utterances, kSteps);
  shared->apc_probe_accuracy =
      LinearProbeAccuracy(ExtractApcFeatures(shared->apc.model, shared->corpus.utterances, 1));
  const double gain = shared->apc_probe_accuracy - raw;
  v.Check(gain >= 0.05, "gain " + Fmt(100 * gain, 2) + " points below 5");
  v.Note("raw " + Fmt(raw) + ", apc " + Fmt(shared->apc_probe_accuracy) + ", gain " +
         Fmt(100 * gain, 2) + " points");
  return v;
}

Verdict ApcVersusCpc(const SharedRuns &shared) {
  Verdict v;
  CpcConfig cc;
  cc.input_dim = shared.corpus.utterances.front().dim();
  cc.encoder_width = kHidden;
  cc.context_width = kHidden;
  cc.n_steps = kSteps;
  cc.variant = CpcVariant::kCtxN9Same;
  CpcTrainConfig ct;
  ct.epochs = kEpochs;
  ct.learning_rate = kLearningRate;
  auto cpc = TrainCpc<float>(shared.corpus.utterances, cc, ct);
  const double cpc_acc = LinearProbeAccuracy(
      ExtractCpcFeatures(cpc.model, shared.corpus.utterances, FeatureTap::kContext));
  v.Check(shared.apc_probe_accuracy >= cpc_acc, "apc below cpc");
  v.Note("apc " + Fmt(shared.apc_probe_accuracy) + ", cpc-n9same context " + Fmt(cpc_acc) +
         " (width " + std::to_string(kHidden) + ", n=" + std::to_string(kSteps) + ", " +
         std::to_string(kEpochs) + " epochs each)");
  return v;
}

Verdict LowerLayersCarrySpeaker(std::vector<std::string> *copy_notes, bool *copy_ok) {
  Verdict v;
  SynthConfig sc;
  sc.speaker_offset_scale = 0.1;
  Corpus corpus = NormalizedSynthetic(sc);
  auto apc = TrainReferenceApc(corpus, 3);
  const double copy = CopyPredictorLoss(corpus.utterances, kSteps);
  *copy_ok &= apc.loss_history.back() < copy;
  copy_notes->push_back("3-layer " + Fmt(apc.loss_history.back()) + " < " + Fmt(copy));
  SpeakerTrialSetup setup = MakeSpeakerTrials(corpus, 5, 200);
  double eer[4] = {0, 0, 0, 0};
  for (size_t layer = 1; layer <= 3; ++layer)
    eer[layer] = RunSpeakerVerification(ExtractApcFeatures(apc.model, corpus.utterances, layer),
                                        setup.trials)
                     .eer.eer;
  v.Check(eer[1] <= eer[3], "layer 1 eer above layer 3");
  v.Note("offset scale 0.1, " + std::to_string(setup.trials.trials.size()) +
         " trials, eer layer1 " + Fmt(eer[1]) + " layer2 " + Fmt(eer[2]) + " layer3 " +
         Fmt(eer[3]));
  return v;
}

Verdict StructuralInvariants() {
  Verdict v;
  {  // APC causality: perturbing frame t leaves outputs before t untouched.
    ApcModel<double> model(TinyApc(3), 60);
    auto x = RandomInput<double>(12, 4, 61);
    auto base = model.Forward(x, 1).predictions;
    bool ok = true;
    for (size_t t : {0u, 5u, 11u}) {
      auto p = x;
      p(t, 1) += 0.5;
      auto y = model.Forward(p, 1).predictions;
      for (size_t i = 0; i < t; ++i)
        for (size_t d = 0; d < 4; ++d) ok &= y(i, d) == base(i, d);
      bool changed = false;
      for (size_t d = 0; d < 4; ++d) changed |= y(t, d) != base(t, d);
      ok &= changed;
    }
    v.Check(ok, "apc causality");
  }
  {  // CPC context causality.
    CpcModel<double> model(TinyCpc(CpcVariant::kCtxN9Same, 1), 62);
    auto x = RandomInput<double>(10, 4, 63, 2.0);
    auto base = model.Forward(x, 1).c;
    bool ok = true;
    for (size_t t : {0u, 4u, 9u}) {
      auto p = x;
      p(t, 0) += 0.5;
      auto c = model.Forward(p, 1).c;
      for (size_t i = 0; i < t; ++i)
        for (size_t d = 0; d < c.cols(); ++d) ok &= c(i, d) == base(i, d);
    }
    v.Check(ok, "cpc causality");
  }
  {  // Residual identity: a zeroed upper LSTM passes its input through.
    ApcModel<double> model(TinyApc(3), 64);
    for (const char *s : {".wx", ".wh", ".b"})
      model.params().value(std::string("apc.lstm2") + s).SetZero();
    auto fwd = model.Forward(RandomInput<double>(9, 4, 65), 1);
    v.Check(fwd.layer_outputs[1] == fwd.layer_outputs[0], "residual identity");
  }
  {  // Padded batch against per-utterance evaluation.
    std::mt19937_64 rng(66);
    std::vector<FeatureSequence> corpus;
    for (size_t i = 0; i < 6; ++i) {
      FeatureSequence s;
      s.utterance_id = "u" + std::to_string(i);
      s.speaker_id = "s";
      s.frames = RandomInput<float>(4 + rng() % 12, 4, rng());
      corpus.push_back(s);
    }
    ApcModel<double> batched(TinyApc(2), 67);
    ApcModel<double> single = batched;
    std::vector<size_t> idx{0, 1, 2, 3, 4, 5};
    Batch batch = PackBatch(corpus, idx);
    batched.params().ZeroGrad();
    const double padded =
        ApcLossAndGrad(&batched, Cast<double>(batch.frames), batch.size, batch.lengths, 2);
    single.params().ZeroGrad();
    double separate = 0;
    for (const auto &seq : corpus) {
      const size_t len = seq.num_frames();
      separate += ApcLossAndGrad(&single, Cast<double>(seq.frames), 1,
                                 std::span<const size_t>(&len, 1), 2);
    }
    double gap = std::abs(padded - separate);
    for (const auto &[name, p] : batched.params()) {
      const auto &g = single.params().at(name).grad;
      for (size_t i = 0; i < g.size(); ++i)
        gap = std::max(gap, std::abs(p.grad.data()[i] - g.data()[i]));
    }
    v.Check(gap <= 1e-6, "padding mask gap " + Sci(gap));
    v.Note("mask gap " + Sci(gap));
  }
  const std::filesystem::path dir = std::filesystem::temp_directory_path() /
                                    ("predcode_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  {  // Checkpoint round trip.
    ApcModel<float> model(TinyApc(2), 68);
    const std::string path = (dir / "model.ckpt").string();
    SaveCheckpoint(path, model.params());
    ApcModel<float> other(TinyApc(2), 69);
    LoadCheckpointInto(path, &other.params());
    v.Check(other.params().ValuesEqual(model.params()) &&
                EncodeCheckpoint(other.params()) == EncodeCheckpoint(model.params()),
            "checkpoint round trip");
  }
  {  // Feature file round trip.
    FeatureSequence seq;
    seq.utterance_id = "utt";
    seq.speaker_id = "spk";
    seq.frames = RandomInput<float>(7, 5, 70);
    seq.phone_labels = std::vector<int32_t>{0, 1, 2, 3, 4, 5, 6};
    const std::string path = (dir / "utt.feat").string();
    SaveFeatures(path, seq);
    const FeatureSequence back = LoadFeatures(path);
    v.Check(back == seq && EncodeFeatures(back) == EncodeFeatures(seq), "feature round trip");
  }
  std::filesystem::remove_all(dir);
  {  // Determinism under a fixed seed.
    SynthConfig sc;
    sc.n_speakers = 4;
    sc.utterances_per_speaker = 4;
    sc.frames_per_utterance = 40;
    sc.feature_dim = 8;
    Corpus corpus = NormalizedSynthetic(sc);
    ApcTrainConfig tc;
    tc.n_steps = 2;
    tc.epochs = 5;
    tc.batch_size = 4;
    ApcConfig mc;
    mc.input_dim = 8;
    mc.hidden = 16;
    auto a = TrainApc<float>(corpus.utterances, mc, tc);
    auto b = TrainApc<float>(corpus.utterances, mc, tc);
    v.Check(a.loss_history == b.loss_history && a.model.params().ValuesEqual(b.model.params()),
            "apc determinism");
    CpcConfig cc;
    cc.input_dim = 8;
    cc.encoder_width = 16;
    cc.context_width = 16;
    CpcTrainConfig ct;
    ct.epochs = 5;
    ct.batch_size = 4;
    auto c = TrainCpc<float>(corpus.utterances, cc, ct);
    auto d = TrainCpc<float>(corpus.utterances, cc, ct);
    v.Check(c.loss_history == d.loss_history && c.model.params().ValuesEqual(d.model.params()),
            "cpc determinism");
  }
  v.Note("causality, residual, round trips, determinism");
  return v;
}

Verdict InitializationSanity(const SharedRuns &shared, const std::vector<std::string> &copy_notes,
                             bool copy_ok) {
  Verdict v;
  // The first-epoch batches are scored at the initial weights by running one
  // epoch with a zero step size; the logged running mean of a normal first
  // epoch is reported alongside.
  for (CpcVariant variant : {CpcVariant::kN9All, CpcVariant::kN9Same, CpcVariant::kCtxN9Same,
                             CpcVariant::kCtxExhaust}) {
    const bool exhaust = variant == CpcVariant::kCtxExhaust;
    SynthConfig sc;
    if (exhaust) sc.frames_per_utterance = 128;
    Corpus corpus = exhaust ? NormalizedSynthetic(sc) : shared.corpus;
    CpcConfig cc;
    cc.input_dim = corpus.utterances.front().dim();
    cc.encoder_width = kHidden;
    cc.context_width = kHidden;
    cc.n_steps = kSteps;
    cc.variant = variant;
    CpcTrainConfig ct;
    ct.epochs = 1;
    ct.learning_rate = 0.0;
    const double per_step = exhaust ? static_cast<double>(kSteps) : 1.0;
    const double init = TrainCpc<float>(corpus.utterances, cc, ct).loss_history.front() / per_step;
    ct.learning_rate = 1e-3;
    const double logged =
        TrainCpc<float>(corpus.utterances, cc, ct).loss_history.front() / per_step;
    const double candidates = exhaust ? 8.0 * 128.0 : cc.negatives + 1.0;
    const double ref = std::log(candidates);
    v.Check(std::abs(init - ref) <= 0.1, VariantName(variant) + " initial " + Fmt(init));
    v.Note(VariantName(variant) + " init " + Fmt(init) + " vs ln(" + Fmt(candidates, 0) + ")=" +
           Fmt(ref) + " (first-epoch mean " + Fmt(logged) + ")");
  }
  // APC against the copy predictor on every default synthetic run here.
  bool ok = copy_ok && shared.apc.loss_history.back() < shared.copy_loss;
  std::string notes = "apc 1-layer " + Fmt(shared.apc.loss_history.back()) + " < " +
                      Fmt(shared.copy_loss);
  for (uint64_t seed : {1u, 2u}) {
    SynthConfig sc;
    sc.seed = seed;
    Corpus corpus = NormalizedSynthetic(sc);
    auto apc = TrainReferenceApc(corpus, 1);
    const double copy = CopyPredictorLoss(corpus.utterances, kSteps);
    ok &= apc.loss_history.back() < copy;
    notes += ", seed " + std::to_string(seed) + " " + Fmt(apc.loss_history.back()) + " < " +
             Fmt(copy);
  }
  for (const auto &n : copy_notes) notes += ", " + n;
  v.Check(ok, "apc does not beat the copy predictor");
  v.Note(notes);
  return v;
}

struct Criterion {
  int id;
  const char *name;
  double budget_seconds;
  std::function<Verdict()> run;
};

// With no arguments every criterion runs; otherwise only the listed ids.
// Criteria 5 and 8 reuse the runs of criterion 4 (and 8 those of 6), which
// are then executed as prerequisites without printing their verdict.
int Main(int argc, char **argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  SharedRuns shared;
  std::vector<std::string> copy_notes;
  bool copy_ok = true;
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", 60, GradientCorrectness},
      {2, "analytic loss anchors", 10, AnalyticAnchors},
      {3, "metric oracles", 10, MetricOracles},
      {4, "representation beats surface features", 600,
       [&] { return RepresentationBeatsSurface(&shared); }},
      {5, "apc versus cpc ordering", 900, [&] { return ApcVersusCpc(shared); }},
      {6, "lower layers carry more speaker information", 900,
       [&] { return LowerLayersCarrySpeaker(&copy_notes, &copy_ok); }},
      {7, "structural invariants", 120, StructuralInvariants},
      {8, "initialization sanity", 900,
       [&] { return InitializationSanity(shared, copy_notes, copy_ok); }},
  };
  std::set<int> needed = wanted;
  if (wanted.count(5) || wanted.count(8)) needed.insert(4);
  if (wanted.count(8)) needed.insert(6);
  int failures = 0;
  for (const Criterion &c : criteria) {
    if (!wanted.empty() && !needed.count(c.id)) continue;
    const bool report = wanted.empty() || wanted.count(c.id);
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception &e) {
      v.Check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.Check(secs <= c.budget_seconds, "runtime over " + Fmt(c.budget_seconds, 0) + " s");
    if (!report) continue;
    failures += !v.pass();
    std::printf("criterion %d %s: %s [%.1f s] %s\n", c.id, c.name, v.pass() ? "PASS" : "FAIL",
                secs, v.Summary().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace predcode

int main(int argc, char **argv) { return predcode::Main(argc, argv); }
