// src/probes.cc

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

#include "predcode/probes.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "predcode/activation.h"
#include "predcode/adam.h"
#include "predcode/errors.h"

namespace predcode {

std::string ProbeKindName(ProbeKind k) {
  switch (k) {
    case ProbeKind::kLinear: return "linear";
    case ProbeKind::kMlp1: return "mlp1";
    case ProbeKind::kMlp3: return "mlp3";
  }
  return "?";
}

ProbeKind ParseProbeKind(const std::string &s) {
  if (s == "linear") return ProbeKind::kLinear;
  if (s == "mlp1") return ProbeKind::kMlp1;
  if (s == "mlp3") return ProbeKind::kMlp3;
  throw ConfigError("unknown probe kind '" + s + "' (expected linear, mlp1 or mlp3)");
}

namespace {

std::string WeightName(size_t layer) { return "probe.l" + std::to_string(layer) + ".w"; }
std::string BiasName(size_t layer) { return "probe.l" + std::to_string(layer) + ".b"; }

}  // namespace

template <typename Real>
size_t Classifier<Real>::num_hidden() const {
  switch (kind_) {
    case ProbeKind::kLinear: return 0;
    case ProbeKind::kMlp1: return 1;
    case ProbeKind::kMlp3: return 3;
  }
  return 0;
}

template <typename Real>
Classifier<Real>::Classifier(ProbeKind kind, size_t input_dim, size_t num_classes,
                             size_t hidden_width, uint64_t seed)
    : kind_(kind), input_dim_(input_dim), num_classes_(num_classes), hidden_width_(hidden_width) {
  if (input_dim == 0 || num_classes < 2)
    throw ConfigError("probe needs input_dim > 0 and >= 2 classes");
  if (num_hidden() > 0 && hidden_width == 0) throw ConfigError("MLP hidden width must be positive");
  std::mt19937_64 rng(seed);
  size_t in = input_dim;
  for (size_t l = 0; l <= num_hidden(); ++l) {
    const size_t out = l == num_hidden() ? num_classes : hidden_width;
    const double k = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-k, k);
    auto &w = params_.Add(WeightName(l + 1), out, in).value;
    for (auto &v : w.values()) v = static_cast<Real>(dist(rng));
    params_.Add(BiasName(l + 1), 1, out);
    in = out;
  }
}

template <typename Real>
Matrix<Real> Classifier<Real>::Logits(const Matrix<Real> &x) const {
  if (x.cols() != input_dim_)
    throw DimensionError("probe expects width " + std::to_string(input_dim_) + ", got " +
                         x.ShapeString());
  Matrix<Real> h = x;
  for (size_t l = 0; l <= num_hidden(); ++l) {
    Matrix<Real> y = MatMulTransB(h, params_.value(WeightName(l + 1)));
    AddRowVector(params_.value(BiasName(l + 1)).row(0), &y);
    if (l < num_hidden()) y = Apply(Activation::kRelu, y);
    h = std::move(y);
  }
  return h;
}

template <typename Real>
double Classifier<Real>::Loss(const Matrix<Real> &x, std::span<const int32_t> labels, bool grads) {
  if (x.rows() != labels.size()) throw DimensionError("one label per feature row required");
  if (x.rows() == 0) throw EmptyInputError("probe loss on an empty batch");
  if (x.cols() != input_dim_)
    throw DimensionError("probe expects width " + std::to_string(input_dim_) + ", got " +
                         x.ShapeString());
  const size_t layers = num_hidden() + 1;
  std::vector<Matrix<Real>> acts{x};  // acts[l] is the input of layer l
  for (size_t l = 0; l < layers; ++l) {
    Matrix<Real> y = MatMulTransB(acts.back(), params_.value(WeightName(l + 1)));
    AddRowVector(params_.value(BiasName(l + 1)).row(0), &y);
    if (l + 1 < layers) y = Apply(Activation::kRelu, y);
    acts.push_back(std::move(y));
  }
  Matrix<Real> &logits = acts.back();
  const size_t n = x.rows(), c = num_classes_;
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  Matrix<Real> d(n, c);
  for (size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<size_t>(labels[i]) >= c)
      throw ContractError("label " + std::to_string(labels[i]) + " outside [0, " +
                          std::to_string(c) + ")");
    auto row = logits.row(i);
    double top = row[0];
    for (size_t j = 1; j < c; ++j) top = std::max(top, static_cast<double>(row[j]));
    double sum = 0.0;
    for (size_t j = 0; j < c; ++j) sum += std::exp(row[j] - top);
    total += top + std::log(sum) - row[labels[i]];
    if (grads)
      for (size_t j = 0; j < c; ++j)
        d(i, j) = static_cast<Real>(
            (std::exp(row[j] - top) / sum - (static_cast<int32_t>(j) == labels[i] ? 1.0 : 0.0)) *
            inv_n);
  }
  if (grads) {
    for (size_t l = layers; l-- > 0;) {
      auto &w = params_.at(WeightName(l + 1));
      auto &b = params_.at(BiasName(l + 1));
      const Matrix<Real> &in = acts[l];
      Gemm(true, false, w.value.rows(), w.value.cols(), n, d.data(), d.cols(), in.data(),
           in.cols(), Real(1), w.grad.data(), w.value.cols());
      AccumulateColumnSums(d, b.grad.row(0));
      if (l == 0) break;
      d = ActivationBackward(Activation::kRelu, in, MatMul(d, w.value));
    }
  }
  return total * inv_n;
}

template <typename Real>
std::vector<int32_t> Classifier<Real>::Predict(const Matrix<Real> &x) const {
  const Matrix<Real> logits = Logits(x);
  std::vector<int32_t> out(x.rows());
  for (size_t i = 0; i < x.rows(); ++i) {
    auto row = logits.row(i);
    out[i] = static_cast<int32_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

void ValidateProbeData(const ProbeDataset &data, size_t num_classes) {
  if (data.size() == 0) throw EmptyInputError("probe dataset is empty");
  if (data.features.rows() != data.labels.size())
    throw DimensionError("probe dataset has " + std::to_string(data.features.rows()) +
                         " feature rows and " + std::to_string(data.labels.size()) + " labels");
  for (int32_t l : data.labels)
    if (l < 0 || static_cast<size_t>(l) >= num_classes)
      throw ContractError("label " + std::to_string(l) + " outside [0, " +
                          std::to_string(num_classes) + ")");
  if (!data.features.AllFinite()) throw NumericalError("probe features contain non-finite values");
}

template <typename Real>
double FrameErrorRate(const Classifier<Real> &probe, const ProbeDataset &data) {
  if (data.size() == 0) throw EmptyInputError("frame error rate on an empty evaluation set");
  size_t correct = 0;
  const size_t chunk = 4096;
  for (size_t begin = 0; begin < data.size(); begin += chunk) {
    const size_t count = std::min(chunk, data.size() - begin);
    const auto pred = probe.Predict(Cast<Real>(data.features.RowRange(begin, count)));
    for (size_t i = 0; i < count; ++i) correct += pred[i] == data.labels[begin + i];
  }
  return 1.0 - static_cast<double>(correct) / static_cast<double>(data.size());
}

template <typename Real>
Classifier<Real> TrainProbe(const ProbeDataset &train, const ProbeDataset *dev, ProbeKind kind,
                            size_t num_classes, const ProbeTrainConfig &cfg,
                            ProbeTrainStats *stats) {
  ValidateProbeData(train, num_classes);
  if (dev) ValidateProbeData(*dev, num_classes);
  if (cfg.batch_size < 1) throw ConfigError("probe batch_size must be >= 1");
  Classifier<Real> probe(kind, train.features.cols(), num_classes, cfg.hidden_width, cfg.seed);
  AdamState<Real> adam(probe.params());
  std::mt19937_64 rng(cfg.seed + 1);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  ProbeTrainStats local;
  ProbeTrainStats &st = stats ? *stats : local;
  st = ProbeTrainStats{};
  ParamStore<Real> best = probe.params();
  double best_acc = -1.0;
  size_t since_best = 0;
  const size_t dim = train.features.cols();
  Matrix<Real> xb;
  std::vector<int32_t> yb;
  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    size_t batches = 0;
    for (size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const size_t count = std::min(cfg.batch_size, order.size() - begin);
      xb.Resize(count, dim);
      yb.resize(count);
      for (size_t i = 0; i < count; ++i) {
        auto src = train.features.row(order[begin + i]);
        auto dst = xb.row(i);
        for (size_t d = 0; d < dim; ++d) dst[d] = static_cast<Real>(src[d]);
        yb[i] = train.labels[order[begin + i]];
      }
      probe.params().ZeroGrad();
      loss_sum += probe.Loss(xb, yb, true);
      adam.Step(&probe.params(), cfg.learning_rate);
      ++batches;
    }
    st.train_loss.push_back(loss_sum / static_cast<double>(batches));
    st.epochs_run = epoch + 1;
    if (dev) {
      const double acc = 1.0 - FrameErrorRate(probe, *dev);
      if (acc > best_acc) {
        best_acc = acc;
        best = probe.params();
        st.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        break;
      }
    }
  }
  if (dev) {
    for (auto &[name, p] : probe.params()) p.value = best.value(name);
    st.best_dev_accuracy = best_acc;
  }
  return probe;
}

#define PREDCODE_INSTANTIATE(Real)                                                              \
  template class Classifier<Real>;                                                              \
  template Classifier<Real> TrainProbe(const ProbeDataset &, const ProbeDataset *, ProbeKind,   \
                                       size_t, const ProbeTrainConfig &, ProbeTrainStats *);    \
  template double FrameErrorRate(const Classifier<Real> &, const ProbeDataset &);

PREDCODE_INSTANTIATE(float)
PREDCODE_INSTANTIATE(double)

#undef PREDCODE_INSTANTIATE

}  // namespace predcode
