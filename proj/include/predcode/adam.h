// predcode/adam.h

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

#ifndef PREDCODE_ADAM_H_
#define PREDCODE_ADAM_H_

#include <cstdint>
#include <map>
#include <string>

#include "predcode/param_store.h"

namespace predcode {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Real>
class AdamState {
 public:
  AdamState(const ParamStore<Real> &params, AdamOptions options = {});

  uint64_t step() const { return step_; }
  const AdamOptions &options() const { return options_; }

  // Bias-corrected update of every parameter from its gradient buffer.
  // Gradients are left untouched.
  void Step(ParamStore<Real> *params, double learning_rate);

 private:
  struct Moments {
    Matrix<Real> m;
    Matrix<Real> v;
  };
  AdamOptions options_;
  uint64_t step_ = 0;
  std::map<std::string, Moments> moments_;
};

template <typename Real>
void AdamStep(ParamStore<Real> *params, AdamState<Real> *state, double learning_rate) {
  state->Step(params, learning_rate);
}

}  // namespace predcode

#endif  // PREDCODE_ADAM_H_
