// predcode/activation.h

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

#ifndef PREDCODE_ACTIVATION_H_
#define PREDCODE_ACTIVATION_H_

#include <algorithm>
#include <cmath>

#include "predcode/matrix.h"

namespace predcode {

enum class Activation { kSigmoid, kTanh, kRelu };

template <typename Real>
inline Real Sigmoid(Real x) {
  // Split on sign so exp never overflows.
  if (x >= 0) {
    Real e = std::exp(-x);
    return Real(1) / (Real(1) + e);
  }
  Real e = std::exp(x);
  return e / (Real(1) + e);
}

template <typename Real>
inline Real ApplyActivation(Activation kind, Real x) {
  switch (kind) {
    case Activation::kSigmoid: return Sigmoid(x);
    case Activation::kTanh: return std::tanh(x);
    case Activation::kRelu: return std::max(x, Real(0));
  }
  return x;
}

// Derivative expressed through the activation output y = f(x), which is what
// the backward passes keep in their caches.  For relu, y > 0 iff x > 0.
template <typename Real>
inline Real ActivationDerivFromOutput(Activation kind, Real y) {
  switch (kind) {
    case Activation::kSigmoid: return y * (Real(1) - y);
    case Activation::kTanh: return Real(1) - y * y;
    case Activation::kRelu: return y > Real(0) ? Real(1) : Real(0);
  }
  return Real(1);
}

template <typename Real>
Matrix<Real> Apply(Activation kind, const Matrix<Real> &x) {
  Matrix<Real> y(x.rows(), x.cols());
  for (size_t i = 0; i < x.size(); ++i) y.data()[i] = ApplyActivation(kind, x.data()[i]);
  return y;
}

// dx = dy * f'(x), computed from the forward output y.
template <typename Real>
Matrix<Real> ActivationBackward(Activation kind, const Matrix<Real> &y,
                                const Matrix<Real> &dy) {
  Matrix<Real> dx(y.rows(), y.cols());
  for (size_t i = 0; i < y.size(); ++i)
    dx.data()[i] = dy.data()[i] * ActivationDerivFromOutput(kind, y.data()[i]);
  return dx;
}

}  // namespace predcode

#endif  // PREDCODE_ACTIVATION_H_
