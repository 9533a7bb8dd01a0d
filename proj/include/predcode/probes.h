// predcode/probes.h

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

#ifndef PREDCODE_PROBES_H_
#define PREDCODE_PROBES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "predcode/param_store.h"

namespace predcode {

enum class ProbeKind { kLinear, kMlp1, kMlp3 };

std::string ProbeKindName(ProbeKind k);  // "linear", "mlp1", "mlp3"
ProbeKind ParseProbeKind(const std::string &s);

// Frame-level classification data: one row of features per frame.
struct ProbeDataset {
  Matrix<float> features;
  std::vector<int32_t> labels;
  size_t size() const { return labels.size(); }
};

// Affine + softmax classifier with 0 (linear probe), 1 or 3 ReLU hidden
// layers.  The features it consumes come from a frozen extractor; nothing
// here touches extractor parameters.
template <typename Real>
class Classifier {
 public:
  Classifier(ProbeKind kind, size_t input_dim, size_t num_classes, size_t hidden_width,
             uint64_t seed);

  ProbeKind kind() const { return kind_; }
  size_t input_dim() const { return input_dim_; }
  size_t num_classes() const { return num_classes_; }
  ParamStore<Real> &params() { return params_; }
  const ParamStore<Real> &params() const { return params_; }

  Matrix<Real> Logits(const Matrix<Real> &x) const;

  // Mean cross-entropy; with grads, accumulates parameter gradients of the mean.
  double Loss(const Matrix<Real> &x, std::span<const int32_t> labels, bool grads);

  // Argmax per row, ties to the lowest class index.
  std::vector<int32_t> Predict(const Matrix<Real> &x) const;

 private:
  size_t num_hidden() const;

  ProbeKind kind_;
  size_t input_dim_, num_classes_, hidden_width_;
  ParamStore<Real> params_;
};

struct ProbeTrainConfig {
  size_t epochs = 50;
  size_t batch_size = 256;
  double learning_rate = 1e-3;
  size_t hidden_width = 512;
  size_t patience = 5;  // early stop after this many epochs without dev gain
  uint64_t seed = 0;
};

struct ProbeTrainStats {
  size_t epochs_run = 0;
  size_t best_epoch = 0;
  double best_dev_accuracy = 0.0;
  std::vector<double> train_loss;
};

// Adam on shuffled mini-batches.  With a dev set the parameters of the
// best dev-accuracy epoch are kept and training stops after `patience`
// epochs without improvement.
template <typename Real>
Classifier<Real> TrainProbe(const ProbeDataset &train, const ProbeDataset *dev, ProbeKind kind,
                            size_t num_classes, const ProbeTrainConfig &cfg,
                            ProbeTrainStats *stats = nullptr);

// 1 - (correct argmax frames / total frames).
template <typename Real>
double FrameErrorRate(const Classifier<Real> &probe, const ProbeDataset &data);

void ValidateProbeData(const ProbeDataset &data, size_t num_classes);

}  // namespace predcode

#endif  // PREDCODE_PROBES_H_
