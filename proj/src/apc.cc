// src/apc.cc

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

#include "predcode/apc.h"

#include <cmath>

#include "predcode/adam.h"
#include "predcode/errors.h"

namespace predcode {

void ApcConfig::Validate() const {
  if (input_dim == 0 || hidden == 0) throw ConfigError("APC dimensions must be positive");
  if (layers < 1 || layers > 4) throw ConfigError("APC layer count must be 1..4");
}

KeyValues ApcConfig::ToKeyValues() const {
  return {{"input_dim", std::to_string(input_dim)},
          {"hidden", std::to_string(hidden)},
          {"layers", std::to_string(layers)},
          {"residual", residual ? "true" : "false"}};
}

ApcConfig ApcConfig::FromKeyValues(const KeyValues &kv) {
  ApcConfig c;
  try {
    c.input_dim = std::stoul(kv.at("input_dim"));
    c.hidden = std::stoul(kv.at("hidden"));
    c.layers = std::stoul(kv.at("layers"));
    c.residual = kv.at("residual") == "true";
  } catch (const std::out_of_range &) {
    throw ParseError("APC metadata is missing a required key");
  } catch (const std::invalid_argument &) {
    throw ParseError("APC metadata has a malformed number");
  }
  c.Validate();
  return c;
}

template <typename Real>
ApcModel<Real>::ApcModel(const ApcConfig &config, uint64_t seed) : config_(config) {
  config_.Validate();
  std::mt19937_64 rng(seed);
  for (size_t l = 0; l < config_.layers; ++l) {
    layers_.emplace_back("apc.lstm" + std::to_string(l + 1),
                         l == 0 ? config_.input_dim : config_.hidden, config_.hidden);
    layers_.back().Register(&params_, &rng);
  }
  const double k = 1.0 / std::sqrt(static_cast<double>(config_.hidden));
  std::uniform_real_distribution<double> dist(-k, k);
  auto &w = params_.Add("apc.regression.w", config_.input_dim, config_.hidden).value;
  for (auto &v : w.values()) v = static_cast<Real>(dist(rng));
  params_.Add("apc.regression.b", 1, config_.input_dim);
}

template <typename Real>
ApcForwardResult<Real> ApcModel<Real>::Forward(const Matrix<Real> &x, size_t batch) const {
  if (x.cols() != config_.input_dim)
    throw DimensionError("APC expects input width " + std::to_string(config_.input_dim) +
                         ", got " + x.ShapeString());
  ApcForwardResult<Real> fwd;
  fwd.batch = batch;
  fwd.caches.resize(layers_.size());
  const Matrix<Real> *input = &x;
  for (size_t l = 0; l < layers_.size(); ++l) {
    Matrix<Real> out = layers_[l].Forward(params_, *input, batch, &fwd.caches[l]);
    if (HasResidual(l + 1)) AddInPlace(*input, &out);
    fwd.layer_outputs.push_back(std::move(out));
    input = &fwd.layer_outputs.back();
  }
  fwd.predictions = MatMulTransB(fwd.layer_outputs.back(), params_.value("apc.regression.w"));
  AddRowVector(params_.value("apc.regression.b").row(0), &fwd.predictions);
  return fwd;
}

template <typename Real>
void ApcModel<Real>::Backward(const ApcForwardResult<Real> &fwd,
                              const Matrix<Real> &d_predictions) {
  auto &reg_w = params_.at("apc.regression.w");
  auto &reg_b = params_.at("apc.regression.b");
  const Matrix<Real> &top = fwd.layer_outputs.back();
  // dW_r += dY^T * top, db_r += colsum(dY), d(top) = dY * W_r.
  Gemm(true, false, config_.input_dim, config_.hidden, d_predictions.rows(),
       d_predictions.data(), config_.input_dim, top.data(), config_.hidden, Real(1),
       reg_w.grad.data(), config_.hidden);
  AccumulateColumnSums(d_predictions, reg_b.grad.row(0));
  Matrix<Real> d_out = MatMul(d_predictions, reg_w.value);
  for (size_t l = layers_.size(); l-- > 0;) {
    Matrix<Real> d_in = layers_[l].Backward(&params_, fwd.caches[l], d_out);
    if (HasResidual(l + 1)) AddInPlace(d_out, &d_in);
    d_out = std::move(d_in);
  }
}

template <typename Real>
Matrix<Real> ApcModel<Real>::Extract(const Matrix<Real> &x, size_t layer) const {
  if (layer < 1 || layer > layers_.size())
    throw ContractError("layer " + std::to_string(layer) + " out of range 1.." +
                        std::to_string(layers_.size()));
  if (x.cols() != config_.input_dim)
    throw DimensionError("APC expects input width " + std::to_string(config_.input_dim) +
                         ", got " + x.ShapeString());
  Matrix<Real> current = x;
  for (size_t l = 0; l < layer; ++l) {
    Matrix<Real> out = layers_[l].template Forward<Real>(params_, current, 1, nullptr);
    if (HasResidual(l + 1)) AddInPlace(current, &out);
    current = std::move(out);
  }
  return current;
}

template <typename Real>
double ApcL1Loss(const Matrix<Real> &x, const Matrix<Real> &y, size_t n) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw DimensionError("APC loss: x is " + x.ShapeString() + ", y is " + y.ShapeString());
  if (n < 1 || n >= x.rows())
    throw ShiftError("shift n=" + std::to_string(n) + " needs 1 <= n <= T-1 with T=" +
                     std::to_string(x.rows()));
  const size_t len = x.rows();
  return ApcBatchL1<Real>(x, y, 1, std::span<const size_t>(&len, 1), n, Real(1), nullptr).sum;
}

template <typename Real>
MaskedLoss ApcBatchL1(const Matrix<Real> &x, const Matrix<Real> &y, size_t batch,
                      std::span<const size_t> lengths, size_t n, Real scale,
                      Matrix<Real> *d_y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw DimensionError("APC loss: x is " + x.ShapeString() + ", y is " + y.ShapeString());
  if (lengths.size() != batch) throw DimensionError("one length per batch element required");
  const size_t dim = x.cols();
  if (d_y) d_y->Resize(y.rows(), y.cols());
  MaskedLoss loss;
  for (size_t b = 0; b < batch; ++b) {
    if (lengths[b] <= n) continue;
    for (size_t i = 0; i + n < lengths[b]; ++i) {
      const Real *target = x.data() + ((i + n) * batch + b) * dim;
      const Real *pred = y.data() + (i * batch + b) * dim;
      Real *grad = d_y ? d_y->data() + (i * batch + b) * dim : nullptr;
      double row_sum = 0.0;
      for (size_t d = 0; d < dim; ++d) {
        const Real diff = pred[d] - target[d];
        row_sum += std::abs(static_cast<double>(diff));
        if (grad) grad[d] = diff > 0 ? scale : (diff < 0 ? -scale : Real(0));
      }
      loss.sum += row_sum;
      loss.terms += dim;
    }
  }
  return loss;
}

double CopyPredictorLoss(const std::vector<FeatureSequence> &corpus, size_t n) {
  double sum = 0.0;
  size_t terms = 0;
  for (const auto &seq : corpus) {
    for (size_t i = 0; i + n < seq.num_frames(); ++i)
      for (size_t d = 0; d < seq.dim(); ++d)
        sum += std::abs(static_cast<double>(seq.frames(i + n, d)) - seq.frames(i, d));
    if (seq.num_frames() > n) terms += (seq.num_frames() - n) * seq.dim();
  }
  if (terms == 0) throw EmptyInputError("no valid terms for the copy-predictor loss");
  return sum / static_cast<double>(terms);
}

void ValidateApcCorpus(const std::vector<FeatureSequence> &corpus, size_t input_dim, size_t n) {
  if (corpus.empty()) throw EmptyInputError("training corpus is empty");
  if (n < 1) throw ConfigError("n_steps must be >= 1");
  for (const auto &seq : corpus) {
    if (seq.dim() != input_dim)
      throw DimensionError("utterance '" + seq.utterance_id + "' has dimension " +
                           std::to_string(seq.dim()) + ", model expects " +
                           std::to_string(input_dim));
    if (seq.num_frames() < n + 1)
      throw ContractError("utterance '" + seq.utterance_id + "' has " +
                          std::to_string(seq.num_frames()) + " frames; n_steps=" +
                          std::to_string(n) + " needs at least " + std::to_string(n + 1));
  }
}

template <typename Real>
ApcTrainResult<Real> TrainApc(const std::vector<FeatureSequence> &corpus,
                              const ApcConfig &model_config, const ApcTrainConfig &cfg,
                              const EpochCallback &on_epoch) {
  ValidateApcCorpus(corpus, model_config.input_dim, cfg.n_steps);
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  ApcTrainResult<Real> result{ApcModel<Real>(model_config, cfg.seed), {}};
  ApcModel<Real> &model = result.model;
  AdamState<Real> adam(model.params());
  BatchOptions options;
  options.batch_size = cfg.batch_size;
  Matrix<Real> d_pred;
  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_sum = 0.0;
    size_t epoch_terms = 0;
    for (const Batch &batch : MakeBatches(corpus, options, cfg.seed, epoch)) {
      const Matrix<Real> x = Cast<Real>(batch.frames);
      auto fwd = model.Forward(x, batch.size);
      // Every utterance is longer than n, so each contributes len - n rows.
      size_t terms = 0;
      for (size_t len : batch.lengths) terms += (len - cfg.n_steps) * batch.dim;
      const Real scale = static_cast<Real>(1.0 / static_cast<double>(terms));
      MaskedLoss loss = ApcBatchL1<Real>(x, fwd.predictions, batch.size, batch.lengths,
                                         cfg.n_steps, scale, &d_pred);
      if (!std::isfinite(loss.sum))
        throw NumericalError("non-finite APC loss at epoch " + std::to_string(epoch));
      model.params().ZeroGrad();
      model.Backward(fwd, d_pred);
      adam.Step(&model.params(), cfg.learning_rate);
      epoch_sum += loss.sum;
      epoch_terms += loss.terms;
    }
    const double mean = epoch_terms ? epoch_sum / static_cast<double>(epoch_terms) : 0.0;
    result.loss_history.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

template <typename Real>
double EvaluateApcLoss(const ApcModel<Real> &model, const std::vector<FeatureSequence> &corpus,
                       size_t n, size_t batch_size) {
  ValidateApcCorpus(corpus, model.config().input_dim, n);
  MaskedLoss total;
  std::vector<size_t> indices;
  for (size_t begin = 0; begin < corpus.size(); begin += batch_size) {
    indices.clear();
    for (size_t i = begin; i < std::min(corpus.size(), begin + batch_size); ++i)
      indices.push_back(i);
    Batch batch = PackBatch(corpus, indices);
    const Matrix<Real> x = Cast<Real>(batch.frames);
    auto fwd = model.Forward(x, batch.size);
    MaskedLoss l = ApcBatchL1<Real>(x, fwd.predictions, batch.size, batch.lengths, n, Real(1),
                                    nullptr);
    total.sum += l.sum;
    total.terms += l.terms;
  }
  return total.mean();
}

#define PREDCODE_INSTANTIATE(Real)                                                         \
  template class ApcModel<Real>;                                                           \
  template double ApcL1Loss(const Matrix<Real> &, const Matrix<Real> &, size_t);           \
  template MaskedLoss ApcBatchL1(const Matrix<Real> &, const Matrix<Real> &, size_t,       \
                                 std::span<const size_t>, size_t, Real, Matrix<Real> *);   \
  template ApcTrainResult<Real> TrainApc(const std::vector<FeatureSequence> &,             \
                                         const ApcConfig &, const ApcTrainConfig &,        \
                                         const EpochCallback &);                           \
  template double EvaluateApcLoss(const ApcModel<Real> &,                                  \
                                  const std::vector<FeatureSequence> &, size_t, size_t);

PREDCODE_INSTANTIATE(float)
PREDCODE_INSTANTIATE(double)

#undef PREDCODE_INSTANTIATE

}  // namespace predcode
