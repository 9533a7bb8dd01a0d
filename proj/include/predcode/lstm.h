// predcode/lstm.h

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

#ifndef PREDCODE_LSTM_H_
#define PREDCODE_LSTM_H_

#include <random>
#include <string>

#include "predcode/param_store.h"

namespace predcode {

template <typename Real>
struct LstmCache {
  size_t batch = 0;
  Matrix<Real> input;      // (T*B) x Din
  Matrix<Real> gates;      // (T*B) x 4H, post-activation, order i, f, g, o
  Matrix<Real> cell;       // (T*B) x H
  Matrix<Real> cell_tanh;  // (T*B) x H
  Matrix<Real> hidden;     // (T*B) x H
};

// A unidirectional LSTM layer whose weights live in a ParamStore under
// "<prefix>.wx" (4H x Din), "<prefix>.wh" (4H x H) and "<prefix>.b" (1 x 4H).
// Sequences are time-major batches: row t*B + b is step t of sequence b.
// State starts at zero, so outputs at step t depend only on inputs <= t.
class LstmLayer {
 public:
  LstmLayer() = default;
  LstmLayer(std::string prefix, size_t input_dim, size_t hidden_dim);

  size_t input_dim() const { return input_dim_; }
  size_t hidden_dim() const { return hidden_dim_; }
  std::string wx_name() const { return prefix_ + ".wx"; }
  std::string wh_name() const { return prefix_ + ".wh"; }
  std::string bias_name() const { return prefix_ + ".b"; }

  // uniform(-1/sqrt(H), 1/sqrt(H)) weights, zero bias except forget gate = 1.
  template <typename Real>
  void Register(ParamStore<Real> *params, std::mt19937_64 *rng) const;

  template <typename Real>
  Matrix<Real> Forward(const ParamStore<Real> &params, const Matrix<Real> &x, size_t batch,
                       LstmCache<Real> *cache) const;

  // Accumulates parameter gradients and returns d(input).
  template <typename Real>
  Matrix<Real> Backward(ParamStore<Real> *params, const LstmCache<Real> &cache,
                        const Matrix<Real> &d_hidden) const;

 private:
  std::string prefix_;
  size_t input_dim_ = 0;
  size_t hidden_dim_ = 0;
};

// Single sequence, T x Din -> T x H.
template <typename Real>
Matrix<Real> LstmForward(const ParamStore<Real> &params, const LstmLayer &layer,
                         const Matrix<Real> &inputs) {
  return layer.Forward<Real>(params, inputs, 1, nullptr);
}

}  // namespace predcode

#endif  // PREDCODE_LSTM_H_
