// predcode/grad_check.h

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

#ifndef PREDCODE_GRAD_CHECK_H_
#define PREDCODE_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <string>

#include "predcode/param_store.h"

namespace predcode {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  size_t probes = 0;
};

// Compares analytic gradients against central finite differences on
// probe_count coordinates drawn uniformly over all scalars in params.
//
// loss_and_grad must be deterministic: it returns the loss at the current
// parameter values and accumulates the analytic gradient into the store's
// gradient buffers (GradCheck zeroes them before the analytic call).
// Relative error is |a - n| / max(|a|, |n|, 1e-12).  A non-finite loss
// raises NumericalError naming the perturbed coordinate.
GradCheckResult GradCheck(const std::function<double()> &loss_and_grad,
                          ParamStore<double> *params, size_t probe_count,
                          double eps, uint64_t seed);

}  // namespace predcode

#endif  // PREDCODE_GRAD_CHECK_H_
