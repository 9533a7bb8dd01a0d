// predcode/cpc.h

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

#ifndef PREDCODE_CPC_H_
#define PREDCODE_CPC_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "predcode/apc.h"
#include "predcode/batching.h"
#include "predcode/key_value.h"
#include "predcode/lstm.h"

namespace predcode {

enum class CpcVariant { kN9All, kN9Same, kCtxN9Same, kCtxExhaust };
enum class NegativeStrategy { kWithinBatch, kWithinUtterance, kExhaustiveBatch };
enum class FeatureTap { kFrame, kContext };

std::string VariantName(CpcVariant v);  // "n9all", "n9same", "ctx_n9same", "ctx_exhaust"
CpcVariant ParseVariant(const std::string &s);
std::string StrategyName(NegativeStrategy s);
NegativeStrategy StrategyFor(CpcVariant v);
FeatureTap TapFor(CpcVariant v);
std::string TapName(FeatureTap t);
FeatureTap ParseTap(const std::string &s);

struct CpcConfig {
  size_t input_dim = 80;
  size_t encoder_width = 512;
  size_t context_width = 512;
  size_t n_steps = 1;
  CpcVariant variant = CpcVariant::kN9Same;
  size_t negatives = 9;  // ignored by the exhaustive variant

  // The exhaustive variant keeps one bilinear matrix per step k = 1..n; the
  // single-step variants keep one matrix for step n.
  size_t num_scorers() const { return variant == CpcVariant::kCtxExhaust ? n_steps : 1; }
  void Validate() const;
  KeyValues ToKeyValues() const;
  static CpcConfig FromKeyValues(const KeyValues &kv);
};

// A frame inside a batch: utterance slot and time index.
struct FrameRef {
  size_t utt = 0;
  size_t time = 0;
  bool operator==(const FrameRef &) const = default;
};

// Draws negatives for an anchor whose target is (anchor.utt, anchor.time + step).
//   within_batch:      uniform with replacement over frames of the other
//                      utterances in the batch
//   within_utterance:  uniform with replacement over the anchor's utterance,
//                      excluding the target position
//   exhaustive_batch:  every frame in the batch except the target
// The sampler owns its generator.
class NegativeSampler {
 public:
  NegativeSampler(NegativeStrategy strategy, size_t count, uint64_t seed)
      : strategy_(strategy), count_(count), rng_(seed) {}

  NegativeStrategy strategy() const { return strategy_; }
  size_t count() const { return count_; }

  std::vector<FrameRef> Sample(std::span<const size_t> lengths, FrameRef anchor, size_t step);

 private:
  NegativeStrategy strategy_;
  size_t count_;
  std::mt19937_64 rng_;
};

std::vector<FrameRef> SampleNegatives(const Batch &batch, FrameRef anchor,
                                      NegativeSampler *sampler, size_t step);

// InfoNCE for one anchor: -log softmax of the positive among
// {positive} u negatives, with score z^T W c.  Stabilized with log-sum-exp.
double CpcLoss(std::span<const double> context, std::span<const double> positive,
               const std::vector<std::vector<double>> &negatives, const Matrix<double> &w);

// -log(exp(logits[target]) / sum_j exp(logits[j])), log-sum-exp internally.
double SoftmaxCrossEntropy(std::span<const double> logits, size_t target);

template <typename Real>
struct CpcForwardResult {
  size_t batch = 0;
  Matrix<Real> input;
  Matrix<Real> encoder1, encoder2;  // ReLU outputs of the first two layers
  Matrix<Real> z;                   // frame encoder output
  LstmCache<Real> context_cache;
  Matrix<Real> c;                   // context output
};

// One sampled anchor: rows index the time-major batch.
struct AnchorPlan {
  size_t anchor_row;
  size_t target_row;
  std::vector<size_t> negative_rows;
};

template <typename Real>
class CpcModel {
 public:
  CpcModel(const CpcConfig &config, uint64_t seed);

  const CpcConfig &config() const { return config_; }
  ParamStore<Real> &params() { return params_; }
  const ParamStore<Real> &params() const { return params_; }
  static std::string ScorerName(size_t index);  // 0-based

  // z = E_frm(x) (three affine + ReLU layers), frame local.
  Matrix<Real> EncodeFrames(const Matrix<Real> &x) const;
  // c = E_ctx(z), one unidirectional LSTM layer.
  Matrix<Real> ContextForward(const Matrix<Real> &z, size_t batch) const;

  CpcForwardResult<Real> Forward(const Matrix<Real> &x, size_t batch) const;
  void Backward(const CpcForwardResult<Real> &fwd, const Matrix<Real> &d_z,
                const Matrix<Real> &d_c);

  // Single sequence, T x width; no gradient state.
  Matrix<Real> Extract(const Matrix<Real> &x, FeatureTap tap) const;

 private:
  CpcConfig config_;
  LstmLayer context_;
  ParamStore<Real> params_;
};

// Mean InfoNCE over sampled anchors for scorer `scorer`.  With grads, adds
// d(loss)/dz and d(loss)/dc into d_z / d_c (already shaped like z / c) and
// accumulates the scorer gradient into the model.
template <typename Real>
double SampledStepLoss(CpcModel<Real> *model, const CpcForwardResult<Real> &fwd,
                       const std::vector<AnchorPlan> &plan, size_t scorer, bool grads,
                       Matrix<Real> *d_z, Matrix<Real> *d_c);

// Mean InfoNCE at step k where every valid frame of the batch is a
// candidate (the target plus all non-target frames).
template <typename Real>
double ExhaustiveStepLoss(CpcModel<Real> *model, const CpcForwardResult<Real> &fwd,
                          std::span<const size_t> lengths, size_t step, size_t scorer,
                          bool grads, Matrix<Real> *d_z, Matrix<Real> *d_c);

// Anchors at every t with t + step < length, negatives from the sampler.
std::vector<AnchorPlan> PlanAnchors(std::span<const size_t> lengths, size_t step,
                                    NegativeSampler *sampler);

// Full batch loss for the configured variant: single-step variants use the
// given plan; the exhaustive variant sums the per-step losses for k = 1..n.
// With grads, model gradients are accumulated (not zeroed).
template <typename Real>
double CpcBatchLoss(CpcModel<Real> *model, const Matrix<Real> &x, size_t batch,
                    std::span<const size_t> lengths, const std::vector<AnchorPlan> &plan,
                    bool grads);

struct CpcTrainConfig {
  size_t epochs = 100;
  size_t batch_size = 32;   // single-step variants
  size_t exhaust_batch_size = 8;
  size_t chunk_length = 128;
  bool pad_short_chunks = false;
  double learning_rate = 1e-3;
  uint64_t seed = 0;
};

template <typename Real>
struct CpcTrainResult {
  CpcModel<Real> model;
  std::vector<double> loss_history;  // mean batch loss per epoch
};

template <typename Real>
CpcTrainResult<Real> TrainCpc(const std::vector<FeatureSequence> &corpus,
                              const CpcConfig &model_config, const CpcTrainConfig &train_config,
                              const EpochCallback &on_epoch = {});

}  // namespace predcode

#endif  // PREDCODE_CPC_H_
