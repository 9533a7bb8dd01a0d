// src/adam.cc

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

#include "predcode/adam.h"

#include <cmath>

#include "predcode/errors.h"

namespace predcode {

template <typename Real>
AdamState<Real>::AdamState(const ParamStore<Real> &params, AdamOptions options)
    : options_(options) {
  for (const auto &[name, p] : params) {
    Moments &mo = moments_[name];
    mo.m.Resize(p.value.rows(), p.value.cols());
    mo.v.Resize(p.value.rows(), p.value.cols());
  }
}

template <typename Real>
void AdamState<Real>::Step(ParamStore<Real> *params, double learning_rate) {
  if (params->size() != moments_.size())
    throw ConsistencyError("optimizer state tracks " + std::to_string(moments_.size()) +
                           " parameters but the store has " +
                           std::to_string(params->size()));
  for (auto &[name, p] : *params) {
    auto it = moments_.find(name);
    if (it == moments_.end())
      throw ConsistencyError("no optimizer state (gradient slot) for parameter '" + name + "'");
    if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols() ||
        it->second.m.size() != p.value.size())
      throw ConsistencyError("gradient for parameter '" + name + "' has shape " +
                             p.grad.ShapeString() + ", expected " + p.value.ShapeString());
  }
  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (auto &[name, p] : *params) {
    Moments &mo = moments_.at(name);
    Real *w = p.value.data();
    const Real *g = p.grad.data();
    Real *m = mo.m.data();
    Real *v = mo.v.data();
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double gi = g[i];
      const double mi = b1 * m[i] + (1.0 - b1) * gi;
      const double vi = b2 * v[i] + (1.0 - b2) * gi * gi;
      m[i] = static_cast<Real>(mi);
      v[i] = static_cast<Real>(vi);
      const double m_hat = mi / correction1;
      const double v_hat = vi / correction2;
      w[i] = static_cast<Real>(w[i] -
                               learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon));
    }
  }
}

template class AdamState<float>;
template class AdamState<double>;

}  // namespace predcode
