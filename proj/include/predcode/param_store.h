// predcode/param_store.h

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

#ifndef PREDCODE_PARAM_STORE_H_
#define PREDCODE_PARAM_STORE_H_

#include <map>
#include <string>
#include <vector>

#include "predcode/matrix.h"

namespace predcode {

template <typename Real>
struct Parameter {
  Matrix<Real> value;
  Matrix<Real> grad;  // always the shape of value
};

// Named trainable tensors with matching gradient buffers.  Iteration order is
// sorted by name, which is also the checkpoint order.
template <typename Real>
class ParamStore {
 public:
  using Map = std::map<std::string, Parameter<Real>>;

  // Throws ConsistencyError on a duplicate name.
  Parameter<Real> &Add(const std::string &name, size_t rows, size_t cols);

  bool Contains(const std::string &name) const { return params_.count(name) != 0; }
  Parameter<Real> &at(const std::string &name);
  const Parameter<Real> &at(const std::string &name) const;
  Matrix<Real> &value(const std::string &name) { return at(name).value; }
  const Matrix<Real> &value(const std::string &name) const { return at(name).value; }
  Matrix<Real> &grad(const std::string &name) { return at(name).grad; }

  void ZeroGrad();
  void ScaleGrad(Real factor);
  size_t NumScalars() const;
  size_t size() const { return params_.size(); }
  std::vector<std::string> Names() const;

  typename Map::iterator begin() { return params_.begin(); }
  typename Map::iterator end() { return params_.end(); }
  typename Map::const_iterator begin() const { return params_.begin(); }
  typename Map::const_iterator end() const { return params_.end(); }

  // Values converted to another precision; gradients are zeroed.
  template <typename To>
  ParamStore<To> Convert() const {
    ParamStore<To> out;
    for (const auto &[name, p] : params_) {
      out.Add(name, p.value.rows(), p.value.cols()).value = Cast<To>(p.value);
    }
    return out;
  }

  // Bitwise equality of values (gradients ignored).
  bool ValuesEqual(const ParamStore &other) const;

 private:
  Map params_;
};

}  // namespace predcode

#endif  // PREDCODE_PARAM_STORE_H_
