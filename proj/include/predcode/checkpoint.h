// predcode/checkpoint.h

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

#ifndef PREDCODE_CHECKPOINT_H_
#define PREDCODE_CHECKPOINT_H_

#include <map>
#include <string>

#include "predcode/param_store.h"

namespace predcode {

// Binary layout (all integers 64-bit little-endian):
//   "APCCKPT1"
//   per tensor, sorted by name:
//     name length, name bytes, rank, dims..., values as float32 LE
// Records run to end of file.  Parameters are always written with rank 2.
template <typename Real>
std::string EncodeCheckpoint(const ParamStore<Real> &params);

template <typename Real>
void SaveCheckpoint(const std::string &path, const ParamStore<Real> &params);

std::map<std::string, Matrix<float>> DecodeCheckpoint(const std::string &bytes,
                                                      const std::string &source);

// Loads tensors into an existing store; names and shapes must match exactly.
template <typename Real>
void LoadCheckpointInto(const std::string &path, ParamStore<Real> *params);

}  // namespace predcode

#endif  // PREDCODE_CHECKPOINT_H_
