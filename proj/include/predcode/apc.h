// predcode/apc.h

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

#ifndef PREDCODE_APC_H_
#define PREDCODE_APC_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "predcode/batching.h"
#include "predcode/feature_sequence.h"
#include "predcode/key_value.h"
#include "predcode/lstm.h"

namespace predcode {

struct ApcConfig {
  size_t input_dim = 80;
  size_t hidden = 512;
  size_t layers = 1;     // 1..4
  bool residual = true;  // identity paths into layers 2..L

  void Validate() const;
  KeyValues ToKeyValues() const;
  static ApcConfig FromKeyValues(const KeyValues &kv);
};

template <typename Real>
struct ApcForwardResult {
  size_t batch = 0;
  std::vector<LstmCache<Real>> caches;
  std::vector<Matrix<Real>> layer_outputs;  // post-residual, one per layer
  Matrix<Real> predictions;                 // (T*B) x D
};

// Stacked unidirectional LSTMs with residual identity paths between equal
// width layers and a linear regression head back to the input width:
//   out_1 = lstm_1(x);  out_l = lstm_l(out_{l-1}) + out_{l-1}  (l >= 2)
//   y = out_L * W_r^T + b_r
template <typename Real>
class ApcModel {
 public:
  ApcModel(const ApcConfig &config, uint64_t seed);

  const ApcConfig &config() const { return config_; }
  ParamStore<Real> &params() { return params_; }
  const ParamStore<Real> &params() const { return params_; }
  bool HasResidual(size_t layer) const { return config_.residual && layer >= 2; }

  // x is a time-major batch of `batch` sequences.
  ApcForwardResult<Real> Forward(const Matrix<Real> &x, size_t batch) const;

  // Accumulates parameter gradients given d(loss)/d(predictions).
  void Backward(const ApcForwardResult<Real> &fwd, const Matrix<Real> &d_predictions);

  // Post-residual hidden states of layer (1-based) for one sequence, T x H.
  Matrix<Real> Extract(const Matrix<Real> &x, size_t layer) const;

 private:
  ApcConfig config_;
  std::vector<LstmLayer> layers_;
  ParamStore<Real> params_;
};

// Sum over i = 1..T-n and all dimensions of |x_{i+n} - y_i| for a single
// sequence.  Throws ShiftError unless 1 <= n <= T-1.
template <typename Real>
double ApcL1Loss(const Matrix<Real> &x, const Matrix<Real> &y, size_t n);

struct MaskedLoss {
  double sum = 0.0;
  size_t terms = 0;  // valid (frame, dimension) pairs
  double mean() const { return terms ? sum / static_cast<double>(terms) : 0.0; }
};

// Masked L1 loss over a time-major batch.  When d_y is given it is resized
// and filled with sign(y_i - x_{i+n}) * scale at valid positions (sign(0) = 0)
// and zero elsewhere.
template <typename Real>
MaskedLoss ApcBatchL1(const Matrix<Real> &x, const Matrix<Real> &y, size_t batch,
                      std::span<const size_t> lengths, size_t n, Real scale,
                      Matrix<Real> *d_y);

// Loss of the trivial predictor y_i = x_i, normalized per valid term.
double CopyPredictorLoss(const std::vector<FeatureSequence> &corpus, size_t n);

struct ApcTrainConfig {
  size_t n_steps = 1;
  size_t epochs = 100;
  size_t batch_size = 32;
  double learning_rate = 1e-3;
  uint64_t seed = 0;
};

template <typename Real>
struct ApcTrainResult {
  ApcModel<Real> model;
  std::vector<double> loss_history;  // per epoch, normalized per valid term
};

using EpochCallback = std::function<void(size_t epoch, double loss)>;

// Adam on padded mini-batches.  Per batch the masked loss sum is divided by
// its number of valid terms, and so are the gradients.
template <typename Real>
ApcTrainResult<Real> TrainApc(const std::vector<FeatureSequence> &corpus,
                              const ApcConfig &model_config, const ApcTrainConfig &train_config,
                              const EpochCallback &on_epoch = {});

// Normalized loss of a model over a corpus (no training).
template <typename Real>
double EvaluateApcLoss(const ApcModel<Real> &model, const std::vector<FeatureSequence> &corpus,
                       size_t n, size_t batch_size = 32);

// Checks training preconditions: nonempty corpus, width D, every utterance
// longer than n frames.  ContractError names the offending utterance.
void ValidateApcCorpus(const std::vector<FeatureSequence> &corpus, size_t input_dim, size_t n);

}  // namespace predcode

#endif  // PREDCODE_APC_H_
