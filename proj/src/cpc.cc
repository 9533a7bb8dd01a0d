// src/cpc.cc

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

#include "predcode/cpc.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "predcode/activation.h"
#include "predcode/adam.h"
#include "predcode/errors.h"

namespace predcode {

std::string VariantName(CpcVariant v) {
  switch (v) {
    case CpcVariant::kN9All: return "n9all";
    case CpcVariant::kN9Same: return "n9same";
    case CpcVariant::kCtxN9Same: return "ctx_n9same";
    case CpcVariant::kCtxExhaust: return "ctx_exhaust";
  }
  return "?";
}

CpcVariant ParseVariant(const std::string &s) {
  for (CpcVariant v : {CpcVariant::kN9All, CpcVariant::kN9Same, CpcVariant::kCtxN9Same,
                       CpcVariant::kCtxExhaust})
    if (s == VariantName(v)) return v;
  throw ConfigError("unknown CPC variant '" + s +
                    "' (expected n9all, n9same, ctx_n9same or ctx_exhaust)");
}

std::string StrategyName(NegativeStrategy s) {
  switch (s) {
    case NegativeStrategy::kWithinBatch: return "within_batch";
    case NegativeStrategy::kWithinUtterance: return "within_utterance";
    case NegativeStrategy::kExhaustiveBatch: return "exhaustive_batch";
  }
  return "?";
}

NegativeStrategy StrategyFor(CpcVariant v) {
  switch (v) {
    case CpcVariant::kN9All: return NegativeStrategy::kWithinBatch;
    case CpcVariant::kN9Same:
    case CpcVariant::kCtxN9Same: return NegativeStrategy::kWithinUtterance;
    case CpcVariant::kCtxExhaust: return NegativeStrategy::kExhaustiveBatch;
  }
  return NegativeStrategy::kWithinBatch;
}

FeatureTap TapFor(CpcVariant v) {
  return v == CpcVariant::kN9All || v == CpcVariant::kN9Same ? FeatureTap::kFrame
                                                             : FeatureTap::kContext;
}

std::string TapName(FeatureTap t) { return t == FeatureTap::kFrame ? "frame" : "context"; }

FeatureTap ParseTap(const std::string &s) {
  if (s == "frame") return FeatureTap::kFrame;
  if (s == "context") return FeatureTap::kContext;
  throw ConfigError("unknown CPC tap '" + s + "' (expected frame or context)");
}

void CpcConfig::Validate() const {
  if (input_dim == 0 || encoder_width == 0 || context_width == 0)
    throw ConfigError("CPC dimensions must be positive");
  if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
  if (variant != CpcVariant::kCtxExhaust && negatives < 1)
    throw ConfigError("need at least one negative");
}

KeyValues CpcConfig::ToKeyValues() const {
  return {{"input_dim", std::to_string(input_dim)},
          {"encoder_width", std::to_string(encoder_width)},
          {"context_width", std::to_string(context_width)},
          {"n_steps", std::to_string(n_steps)},
          {"variant", VariantName(variant)},
          {"negative_strategy", StrategyName(StrategyFor(variant))},
          {"negatives", std::to_string(negatives)},
          {"num_scorers", std::to_string(num_scorers())}};
}

CpcConfig CpcConfig::FromKeyValues(const KeyValues &kv) {
  CpcConfig c;
  try {
    c.input_dim = std::stoul(kv.at("input_dim"));
    c.encoder_width = std::stoul(kv.at("encoder_width"));
    c.context_width = std::stoul(kv.at("context_width"));
    c.n_steps = std::stoul(kv.at("n_steps"));
    c.variant = ParseVariant(kv.at("variant"));
    c.negatives = std::stoul(kv.at("negatives"));
  } catch (const std::out_of_range &) {
    throw ParseError("CPC metadata is missing a required key");
  } catch (const std::invalid_argument &) {
    throw ParseError("CPC metadata has a malformed number");
  }
  c.Validate();
  return c;
}

std::vector<FrameRef> NegativeSampler::Sample(std::span<const size_t> lengths, FrameRef anchor,
                                              size_t step) {
  if (lengths.empty()) throw SamplingError("empty batch");
  if (anchor.utt >= lengths.size()) throw SamplingError("anchor utterance outside the batch");
  const size_t target = anchor.time + step;
  if (target >= lengths[anchor.utt])
    throw SamplingError("target frame " + std::to_string(target) + " beyond utterance length " +
                        std::to_string(lengths[anchor.utt]));
  std::vector<FrameRef> out;
  switch (strategy_) {
    case NegativeStrategy::kWithinBatch: {
      size_t eligible = 0;
      for (size_t u = 0; u < lengths.size(); ++u)
        if (u != anchor.utt) eligible += lengths[u];
      if (eligible == 0)
        throw SamplingError("within_batch sampling needs frames from another utterance");
      std::uniform_int_distribution<size_t> pick(0, eligible - 1);
      out.reserve(count_);
      for (size_t n = 0; n < count_; ++n) {
        size_t idx = pick(rng_);
        size_t u = 0;
        for (;; ++u) {
          if (u == anchor.utt) continue;
          if (idx < lengths[u]) break;
          idx -= lengths[u];
        }
        out.push_back({u, idx});
      }
      break;
    }
    case NegativeStrategy::kWithinUtterance: {
      const size_t len = lengths[anchor.utt];
      if (len < 2) throw SamplingError("within_utterance sampling needs a second frame");
      std::uniform_int_distribution<size_t> pick(0, len - 2);
      out.reserve(count_);
      for (size_t n = 0; n < count_; ++n) {
        size_t t = pick(rng_);
        if (t >= target) ++t;
        out.push_back({anchor.utt, t});
      }
      break;
    }
    case NegativeStrategy::kExhaustiveBatch: {
      for (size_t u = 0; u < lengths.size(); ++u)
        for (size_t t = 0; t < lengths[u]; ++t)
          if (!(u == anchor.utt && t == target)) out.push_back({u, t});
      if (out.empty()) throw SamplingError("no non-target frames in the batch");
      break;
    }
  }
  return out;
}

std::vector<FrameRef> SampleNegatives(const Batch &batch, FrameRef anchor,
                                      NegativeSampler *sampler, size_t step) {
  return sampler->Sample(batch.lengths, anchor, step);
}

double SoftmaxCrossEntropy(std::span<const double> logits, size_t target) {
  if (logits.empty() || target >= logits.size())
    throw ContractError("softmax cross-entropy target out of range");
  // Summing in sorted order makes the result independent of candidate order.
  std::vector<double> sorted(logits.begin(), logits.end());
  std::sort(sorted.begin(), sorted.end());
  const double top = sorted.back();
  double sum = 0.0;
  for (double s : sorted) sum += std::exp(s - top);
  return top + std::log(sum) - logits[target];
}

double CpcLoss(std::span<const double> context, std::span<const double> positive,
               const std::vector<std::vector<double>> &negatives, const Matrix<double> &w) {
  if (negatives.empty()) throw EmptyInputError("CPC loss needs at least one negative");
  if (w.cols() != context.size() || w.rows() != positive.size())
    throw DimensionError("scorer is " + w.ShapeString() + " for z of width " +
                         std::to_string(positive.size()) + " and c of width " +
                         std::to_string(context.size()));
  std::vector<double> u(w.rows());
  for (size_t i = 0; i < w.rows(); ++i) u[i] = Dot(w.row(i).data(), context.data(), w.cols());
  std::vector<double> logits;
  logits.push_back(Dot(positive.data(), u.data(), u.size()));
  for (const auto &neg : negatives) {
    if (neg.size() != u.size()) throw DimensionError("negative frame width mismatch");
    logits.push_back(Dot(neg.data(), u.data(), u.size()));
  }
  return SoftmaxCrossEntropy(logits, 0);
}

template <typename Real>
std::string CpcModel<Real>::ScorerName(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "cpc.score.w%02zu", index + 1);
  return buf;
}

namespace {

const char *kEncW[] = {"cpc.enc1.w", "cpc.enc2.w", "cpc.enc3.w"};
const char *kEncB[] = {"cpc.enc1.b", "cpc.enc2.b", "cpc.enc3.b"};

template <typename Real>
Matrix<Real> AffineRelu(const ParamStore<Real> &params, int layer, const Matrix<Real> &x) {
  Matrix<Real> y = MatMulTransB(x, params.value(kEncW[layer]));
  AddRowVector(params.value(kEncB[layer]).row(0), &y);
  for (auto &v : y.values()) v = std::max(v, Real(0));
  return y;
}

// Given d(out) of an affine+ReLU layer with output `out` and input `in`,
// accumulates weight gradients and returns d(in).
template <typename Real>
Matrix<Real> AffineReluBackward(ParamStore<Real> *params, int layer, const Matrix<Real> &in,
                                const Matrix<Real> &out, const Matrix<Real> &d_out,
                                bool input_grad = true) {
  Matrix<Real> d_pre = ActivationBackward(Activation::kRelu, out, d_out);
  auto &w = params->at(kEncW[layer]);
  auto &b = params->at(kEncB[layer]);
  Gemm(true, false, w.value.rows(), w.value.cols(), d_pre.rows(), d_pre.data(), d_pre.cols(),
       in.data(), in.cols(), Real(1), w.grad.data(), w.value.cols());
  AccumulateColumnSums(d_pre, b.grad.row(0));
  if (!input_grad) return {};
  return MatMul(d_pre, w.value);
}

}  // namespace

template <typename Real>
CpcModel<Real>::CpcModel(const CpcConfig &config, uint64_t seed) : config_(config) {
  config_.Validate();
  std::mt19937_64 rng(seed);
  const size_t widths[] = {config_.input_dim, config_.encoder_width, config_.encoder_width,
                           config_.encoder_width};
  for (int l = 0; l < 3; ++l) {
    const double k = 1.0 / std::sqrt(static_cast<double>(widths[l]));
    std::uniform_real_distribution<double> dist(-k, k);
    auto &w = params_.Add(kEncW[l], widths[l + 1], widths[l]).value;
    for (auto &v : w.values()) v = static_cast<Real>(dist(rng));
    params_.Add(kEncB[l], 1, widths[l + 1]);
  }
  context_ = LstmLayer("cpc.ctx", config_.encoder_width, config_.context_width);
  context_.Register(&params_, &rng);
  const double k = 1.0 / std::sqrt(static_cast<double>(config_.context_width));
  std::uniform_real_distribution<double> dist(-k, k);
  for (size_t s = 0; s < config_.num_scorers(); ++s) {
    auto &w = params_.Add(ScorerName(s), config_.encoder_width, config_.context_width).value;
    for (auto &v : w.values()) v = static_cast<Real>(dist(rng));
  }
}

template <typename Real>
Matrix<Real> CpcModel<Real>::EncodeFrames(const Matrix<Real> &x) const {
  if (x.cols() != config_.input_dim)
    throw DimensionError("CPC frame encoder expects width " + std::to_string(config_.input_dim) +
                         ", got " + x.ShapeString());
  return AffineRelu(params_, 2, AffineRelu(params_, 1, AffineRelu(params_, 0, x)));
}

template <typename Real>
Matrix<Real> CpcModel<Real>::ContextForward(const Matrix<Real> &z, size_t batch) const {
  return context_.template Forward<Real>(params_, z, batch, nullptr);
}

template <typename Real>
CpcForwardResult<Real> CpcModel<Real>::Forward(const Matrix<Real> &x, size_t batch) const {
  if (x.cols() != config_.input_dim)
    throw DimensionError("CPC frame encoder expects width " + std::to_string(config_.input_dim) +
                         ", got " + x.ShapeString());
  CpcForwardResult<Real> fwd;
  fwd.batch = batch;
  fwd.input = x;
  fwd.encoder1 = AffineRelu(params_, 0, x);
  fwd.encoder2 = AffineRelu(params_, 1, fwd.encoder1);
  fwd.z = AffineRelu(params_, 2, fwd.encoder2);
  fwd.c = context_.Forward(params_, fwd.z, batch, &fwd.context_cache);
  return fwd;
}

template <typename Real>
void CpcModel<Real>::Backward(const CpcForwardResult<Real> &fwd, const Matrix<Real> &d_z,
                              const Matrix<Real> &d_c) {
  Matrix<Real> dz = context_.Backward(&params_, fwd.context_cache, d_c);
  AddInPlace(d_z, &dz);
  Matrix<Real> d2 = AffineReluBackward(&params_, 2, fwd.encoder2, fwd.z, dz);
  Matrix<Real> d1 = AffineReluBackward(&params_, 1, fwd.encoder1, fwd.encoder2, d2);
  AffineReluBackward(&params_, 0, fwd.input, fwd.encoder1, d1, /*input_grad=*/false);
}

template <typename Real>
Matrix<Real> CpcModel<Real>::Extract(const Matrix<Real> &x, FeatureTap tap) const {
  Matrix<Real> z = EncodeFrames(x);
  if (tap == FeatureTap::kFrame) return z;
  return ContextForward(z, 1);
}

namespace {

// U = C * W^T: row r holds W c_r.
template <typename Real>
Matrix<Real> ProjectContexts(const Matrix<Real> &c, const Matrix<Real> &w) {
  return MatMulTransB(c, w);
}

// Folds d(loss)/dU into the scorer gradient and d_c.
template <typename Real>
void BackpropProjection(const Matrix<Real> &d_u, const Matrix<Real> &c, Parameter<Real> *w,
                        Matrix<Real> *d_c) {
  Gemm(true, false, w->value.rows(), w->value.cols(), d_u.rows(), d_u.data(), d_u.cols(),
       c.data(), c.cols(), Real(1), w->grad.data(), w->value.cols());
  Gemm(false, false, d_u.rows(), w->value.cols(), w->value.rows(), d_u.data(), d_u.cols(),
       w->value.data(), w->value.cols(), Real(1), d_c->data(), d_c->cols());
}

}  // namespace

template <typename Real>
double SampledStepLoss(CpcModel<Real> *model, const CpcForwardResult<Real> &fwd,
                       const std::vector<AnchorPlan> &plan, size_t scorer, bool grads,
                       Matrix<Real> *d_z, Matrix<Real> *d_c) {
  if (plan.empty()) throw EmptyInputError("no anchors in the batch");
  auto &w = model->params().at(CpcModel<Real>::ScorerName(scorer));
  const Matrix<Real> u = ProjectContexts(fwd.c, w.value);
  const size_t width = u.cols();
  Matrix<Real> d_u;
  if (grads) d_u.Resize(u.rows(), u.cols());
  const double inv_anchors = 1.0 / static_cast<double>(plan.size());
  std::vector<double> logits;
  std::vector<size_t> rows;
  double total = 0.0;
  for (const AnchorPlan &a : plan) {
    if (a.negative_rows.empty()) throw EmptyInputError("anchor without negatives");
    rows.assign(1, a.target_row);
    rows.insert(rows.end(), a.negative_rows.begin(), a.negative_rows.end());
    const Real *ua = u.data() + a.anchor_row * width;
    logits.resize(rows.size());
    for (size_t j = 0; j < rows.size(); ++j)
      logits[j] = Dot(fwd.z.data() + rows[j] * width, ua, width);
    total += SoftmaxCrossEntropy(logits, 0);
    if (!grads) continue;
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double &s : logits) sum += (s = std::exp(s - top));
    Real *dua = d_u.data() + a.anchor_row * width;
    for (size_t j = 0; j < rows.size(); ++j) {
      const Real g = static_cast<Real>((logits[j] / sum - (j == 0 ? 1.0 : 0.0)) * inv_anchors);
      if (g == Real(0)) continue;
      Real *dz = d_z->data() + rows[j] * width;
      const Real *zj = fwd.z.data() + rows[j] * width;
      for (size_t e = 0; e < width; ++e) {
        dz[e] += g * ua[e];
        dua[e] += g * zj[e];
      }
    }
  }
  if (grads) BackpropProjection(d_u, fwd.c, &w, d_c);
  return total * inv_anchors;
}

template <typename Real>
double ExhaustiveStepLoss(CpcModel<Real> *model, const CpcForwardResult<Real> &fwd,
                          std::span<const size_t> lengths, size_t step, size_t scorer,
                          bool grads, Matrix<Real> *d_z, Matrix<Real> *d_c) {
  const size_t batch = fwd.batch;
  if (lengths.size() != batch) throw DimensionError("one length per batch element required");
  auto &w = model->params().at(CpcModel<Real>::ScorerName(scorer));
  const size_t width = w.value.rows();

  // Candidate set: every valid frame.  column[row] maps a batch row to its
  // candidate index.
  std::vector<size_t> candidates, anchors, targets;
  std::vector<size_t> column(fwd.z.rows(), std::numeric_limits<size_t>::max());
  for (size_t b = 0; b < batch; ++b)
    for (size_t t = 0; t < lengths[b]; ++t) {
      const size_t row = t * batch + b;
      column[row] = candidates.size();
      candidates.push_back(row);
    }
  for (size_t b = 0; b < batch; ++b)
    for (size_t t = 0; t + step < lengths[b]; ++t) {
      anchors.push_back(t * batch + b);
      targets.push_back(column[(t + step) * batch + b]);
    }
  if (anchors.empty()) throw EmptyInputError("no anchors at step " + std::to_string(step));
  if (candidates.size() < 2) throw SamplingError("no non-target frames in the batch");

  const size_t n_cand = candidates.size(), n_anchor = anchors.size();
  Matrix<Real> zc(n_cand, width);
  for (size_t i = 0; i < n_cand; ++i) {
    auto src = fwd.z.row(candidates[i]);
    std::copy(src.begin(), src.end(), zc.row(i).begin());
  }
  Matrix<Real> ca(n_anchor, fwd.c.cols());
  for (size_t i = 0; i < n_anchor; ++i) {
    auto src = fwd.c.row(anchors[i]);
    std::copy(src.begin(), src.end(), ca.row(i).begin());
  }
  const Matrix<Real> ua = ProjectContexts(ca, w.value);
  Matrix<Real> logits = MatMulTransB(ua, zc);  // anchors x candidates

  const double inv_anchors = 1.0 / static_cast<double>(n_anchor);
  double total = 0.0;
  std::vector<double> row_logits(n_cand);
  for (size_t a = 0; a < n_anchor; ++a) {
    Real *lr = logits.data() + a * n_cand;
    for (size_t j = 0; j < n_cand; ++j) row_logits[j] = lr[j];
    total += SoftmaxCrossEntropy(row_logits, targets[a]);
    if (!grads) continue;
    const double top = *std::max_element(row_logits.begin(), row_logits.end());
    double sum = 0.0;
    for (double &s : row_logits) sum += (s = std::exp(s - top));
    for (size_t j = 0; j < n_cand; ++j)
      lr[j] = static_cast<Real>((row_logits[j] / sum - (j == targets[a] ? 1.0 : 0.0)) *
                                inv_anchors);
  }
  if (grads) {
    const Matrix<Real> &g = logits;  // now holds d(loss)/d(logits)
    const Matrix<Real> d_zc = MatMulTransA(g, ua);
    const Matrix<Real> d_ua = MatMul(g, zc);
    for (size_t i = 0; i < n_cand; ++i) {
      auto src = d_zc.row(i);
      auto dst = d_z->row(candidates[i]);
      for (size_t e = 0; e < width; ++e) dst[e] += src[e];
    }
    Matrix<Real> d_ca(n_anchor, fwd.c.cols());
    BackpropProjection(d_ua, ca, &w, &d_ca);
    for (size_t i = 0; i < n_anchor; ++i) {
      auto src = d_ca.row(i);
      auto dst = d_c->row(anchors[i]);
      for (size_t e = 0; e < src.size(); ++e) dst[e] += src[e];
    }
  }
  return total * inv_anchors;
}

std::vector<AnchorPlan> PlanAnchors(std::span<const size_t> lengths, size_t step,
                                    NegativeSampler *sampler) {
  const size_t batch = lengths.size();
  std::vector<AnchorPlan> plan;
  for (size_t b = 0; b < batch; ++b)
    for (size_t t = 0; t + step < lengths[b]; ++t) {
      AnchorPlan a{t * batch + b, (t + step) * batch + b, {}};
      for (const FrameRef &f : sampler->Sample(lengths, {b, t}, step))
        a.negative_rows.push_back(f.time * batch + f.utt);
      plan.push_back(std::move(a));
    }
  return plan;
}

template <typename Real>
double CpcBatchLoss(CpcModel<Real> *model, const Matrix<Real> &x, size_t batch,
                    std::span<const size_t> lengths, const std::vector<AnchorPlan> &plan,
                    bool grads) {
  const CpcConfig &cfg = model->config();
  CpcForwardResult<Real> fwd = model->Forward(x, batch);
  Matrix<Real> d_z, d_c;
  if (grads) {
    d_z.Resize(fwd.z.rows(), fwd.z.cols());
    d_c.Resize(fwd.c.rows(), fwd.c.cols());
  }
  double loss = 0.0;
  if (cfg.variant == CpcVariant::kCtxExhaust) {
    for (size_t k = 1; k <= cfg.n_steps; ++k)
      loss += ExhaustiveStepLoss(model, fwd, lengths, k, k - 1, grads, &d_z, &d_c);
  } else {
    loss = SampledStepLoss(model, fwd, plan, 0, grads, &d_z, &d_c);
  }
  if (grads) model->Backward(fwd, d_z, d_c);
  return loss;
}

template <typename Real>
CpcTrainResult<Real> TrainCpc(const std::vector<FeatureSequence> &corpus,
                              const CpcConfig &model_config, const CpcTrainConfig &cfg,
                              const EpochCallback &on_epoch) {
  model_config.Validate();
  const bool exhaust = model_config.variant == CpcVariant::kCtxExhaust;
  const NegativeStrategy strategy = StrategyFor(model_config.variant);
  const size_t needed = strategy == NegativeStrategy::kWithinUtterance
                            ? model_config.n_steps + 2
                            : model_config.n_steps + 1;
  if (corpus.empty()) throw EmptyInputError("training corpus is empty");
  for (const auto &seq : corpus) {
    if (seq.dim() != model_config.input_dim)
      throw DimensionError("utterance '" + seq.utterance_id + "' has dimension " +
                           std::to_string(seq.dim()) + ", model expects " +
                           std::to_string(model_config.input_dim));
    if (seq.num_frames() < needed)
      throw ContractError("utterance '" + seq.utterance_id + "' has " +
                          std::to_string(seq.num_frames()) + " frames; needs at least " +
                          std::to_string(needed));
  }
  if (exhaust && cfg.chunk_length < model_config.n_steps + 1)
    throw ConfigError("chunk_length must exceed n_steps");

  CpcTrainResult<Real> result{CpcModel<Real>(model_config, cfg.seed), {}};
  CpcModel<Real> &model = result.model;
  AdamState<Real> adam(model.params());
  NegativeSampler sampler(strategy, model_config.negatives, cfg.seed ^ 0x5DEECE66DULL);
  BatchOptions options;
  options.batch_size = exhaust ? cfg.exhaust_batch_size : cfg.batch_size;
  options.mode = exhaust ? BatchMode::kChunked : BatchMode::kPadded;
  options.chunk_length = cfg.chunk_length;
  options.pad_short_chunks = cfg.pad_short_chunks;

  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double sum = 0.0;
    size_t count = 0;
    for (const Batch &batch : MakeBatches(corpus, options, cfg.seed, epoch)) {
      // A lone utterance has no other-utterance frames to draw from.
      if (strategy == NegativeStrategy::kWithinBatch && batch.size < 2) continue;
      std::vector<AnchorPlan> plan;
      if (!exhaust) plan = PlanAnchors(batch.lengths, model_config.n_steps, &sampler);
      const Matrix<Real> x = Cast<Real>(batch.frames);
      model.params().ZeroGrad();
      const double loss = CpcBatchLoss(&model, x, batch.size, batch.lengths, plan, true);
      if (!std::isfinite(loss))
        throw NumericalError("non-finite CPC loss at epoch " + std::to_string(epoch));
      adam.Step(&model.params(), cfg.learning_rate);
      sum += loss;
      ++count;
    }
    const double mean = count ? sum / static_cast<double>(count) : 0.0;
    result.loss_history.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

#define PREDCODE_INSTANTIATE(Real)                                                           \
  template class CpcModel<Real>;                                                             \
  template double SampledStepLoss(CpcModel<Real> *, const CpcForwardResult<Real> &,          \
                                  const std::vector<AnchorPlan> &, size_t, bool,             \
                                  Matrix<Real> *, Matrix<Real> *);                           \
  template double ExhaustiveStepLoss(CpcModel<Real> *, const CpcForwardResult<Real> &,       \
                                     std::span<const size_t>, size_t, size_t, bool,          \
                                     Matrix<Real> *, Matrix<Real> *);                        \
  template double CpcBatchLoss(CpcModel<Real> *, const Matrix<Real> &, size_t,               \
                               std::span<const size_t>, const std::vector<AnchorPlan> &,     \
                               bool);                                                        \
  template CpcTrainResult<Real> TrainCpc(const std::vector<FeatureSequence> &,               \
                                         const CpcConfig &, const CpcTrainConfig &,          \
                                         const EpochCallback &);

PREDCODE_INSTANTIATE(float)
PREDCODE_INSTANTIATE(double)

#undef PREDCODE_INSTANTIATE

}  // namespace predcode
