// src/grad_check.cc

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

#include "predcode/grad_check.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "predcode/errors.h"

namespace predcode {

namespace {

struct Coordinate {
  std::string name;
  size_t index;
};

std::string Describe(const Coordinate &c) {
  return c.name + "[" + std::to_string(c.index) + "]";
}

double CheckedLoss(const std::function<double()> &fn, const Coordinate *where) {
  double loss = fn();
  if (!std::isfinite(loss))
    throw NumericalError("non-finite loss" +
                         (where ? " while perturbing " + Describe(*where) : std::string()));
  return loss;
}

}  // namespace

GradCheckResult GradCheck(const std::function<double()> &loss_and_grad,
                          ParamStore<double> *params, size_t probe_count,
                          double eps, uint64_t seed) {
  const size_t total = params->NumScalars();
  if (total == 0) throw EmptyInputError("gradient check on an empty parameter store");

  params->ZeroGrad();
  CheckedLoss(loss_and_grad, nullptr);
  std::map<std::string, Matrix<double>> analytic;
  for (auto &[name, p] : *params) analytic[name] = p.grad;

  // Flat index -> (name, offset).
  std::vector<std::pair<size_t, std::string>> offsets;
  size_t running = 0;
  for (auto &[name, p] : *params) {
    offsets.emplace_back(running, name);
    running += p.value.size();
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, total - 1);

  GradCheckResult result;
  for (size_t probe = 0; probe < probe_count; ++probe) {
    const size_t flat = pick(rng);
    auto it = std::upper_bound(offsets.begin(), offsets.end(), flat,
                               [](size_t f, const auto &e) { return f < e.first; });
    --it;
    Coordinate coord{it->second, flat - it->first};
    double &w = params->value(coord.name).data()[coord.index];
    const double saved = w;
    w = saved + eps;
    const double plus = CheckedLoss(loss_and_grad, &coord);
    w = saved - eps;
    const double minus = CheckedLoss(loss_and_grad, &coord);
    w = saved;

    const double numeric = (plus - minus) / (2.0 * eps);
    const double a = analytic.at(coord.name).data()[coord.index];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
    const double rel = std::abs(a - numeric) / denom;
    if (probe == 0 || rel > result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_parameter = coord.name;
      result.worst_index = coord.index;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
    ++result.probes;
  }
  // Leave the analytic gradient in place for callers that inspect it.
  for (auto &[name, p] : *params) p.grad = analytic.at(name);
  return result;
}

}  // namespace predcode
