// src/param_store.cc

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

#include "predcode/param_store.h"

#include "predcode/errors.h"

namespace predcode {

template <typename Real>
Parameter<Real> &ParamStore<Real>::Add(const std::string &name, size_t rows, size_t cols) {
  auto [it, inserted] = params_.try_emplace(name);
  if (!inserted) throw ConsistencyError("duplicate parameter name '" + name + "'");
  it->second.value.Resize(rows, cols);
  it->second.grad.Resize(rows, cols);
  return it->second;
}

template <typename Real>
Parameter<Real> &ParamStore<Real>::at(const std::string &name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw LookupError("no parameter named '" + name + "'");
  return it->second;
}

template <typename Real>
const Parameter<Real> &ParamStore<Real>::at(const std::string &name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw LookupError("no parameter named '" + name + "'");
  return it->second;
}

template <typename Real>
void ParamStore<Real>::ZeroGrad() {
  for (auto &[name, p] : params_) p.grad.SetZero();
}

template <typename Real>
void ParamStore<Real>::ScaleGrad(Real factor) {
  for (auto &[name, p] : params_)
    for (auto &g : p.grad.values()) g *= factor;
}

template <typename Real>
size_t ParamStore<Real>::NumScalars() const {
  size_t n = 0;
  for (const auto &[name, p] : params_) n += p.value.size();
  return n;
}

template <typename Real>
std::vector<std::string> ParamStore<Real>::Names() const {
  std::vector<std::string> names;
  names.reserve(params_.size());
  for (const auto &[name, p] : params_) names.push_back(name);
  return names;
}

template <typename Real>
bool ParamStore<Real>::ValuesEqual(const ParamStore &other) const {
  if (params_.size() != other.params_.size()) return false;
  auto a = params_.begin();
  auto b = other.params_.begin();
  for (; a != params_.end(); ++a, ++b)
    if (a->first != b->first || !(a->second.value == b->second.value)) return false;
  return true;
}

template class ParamStore<float>;
template class ParamStore<double>;

}  // namespace predcode
