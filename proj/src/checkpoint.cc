// src/checkpoint.cc

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

#include "predcode/checkpoint.h"

#include "predcode/binary_io.h"
#include "predcode/errors.h"

namespace predcode {

namespace {
constexpr char kMagic[] = "APCCKPT1";
constexpr size_t kMagicLen = 8;
}  // namespace

template <typename Real>
std::string EncodeCheckpoint(const ParamStore<Real> &params) {
  std::string out(kMagic, kMagicLen);
  for (const auto &[name, p] : params) {
    AppendLengthPrefixed(name, &out);
    AppendU64(2, &out);
    AppendU64(p.value.rows(), &out);
    AppendU64(p.value.cols(), &out);
    for (Real v : p.value.values()) AppendF32(static_cast<float>(v), &out);
  }
  return out;
}

template <typename Real>
void SaveCheckpoint(const std::string &path, const ParamStore<Real> &params) {
  AtomicWriteFile(path, EncodeCheckpoint(params));
}

std::map<std::string, Matrix<float>> DecodeCheckpoint(const std::string &bytes,
                                                      const std::string &source) {
  ByteReader reader(bytes, source);
  if (reader.ReadBytes(kMagicLen, "checkpoint magic") != std::string(kMagic, kMagicLen)) {
    ByteReader at_start(bytes, source);
    at_start.Fail("bad checkpoint magic (expected APCCKPT1)");
  }
  std::map<std::string, Matrix<float>> tensors;
  std::string previous;
  while (!reader.AtEnd()) {
    std::string name = reader.ReadLengthPrefixed("tensor name");
    if (!tensors.empty() && name <= previous)
      reader.Fail("tensor '" + name + "' out of sorted order or duplicated");
    uint64_t rank = reader.ReadU64("tensor rank");
    if (rank < 1 || rank > 2) reader.Fail("unsupported tensor rank " + std::to_string(rank));
    uint64_t rows = 1, cols = reader.ReadU64("tensor dim");
    if (rank == 2) {
      rows = cols;
      cols = reader.ReadU64("tensor dim");
    }
    if (rows != 0 && cols > reader.remaining() / 4 / rows)
      reader.Fail("tensor '" + name + "' larger than the remaining file");
    Matrix<float> m(rows, cols);
    for (auto &v : m.values()) v = reader.ReadF32("tensor values");
    previous = name;
    tensors.emplace(std::move(name), std::move(m));
  }
  return tensors;
}

template <typename Real>
void LoadCheckpointInto(const std::string &path, ParamStore<Real> *params) {
  auto tensors = DecodeCheckpoint(ReadFileBytes(path), path);
  if (tensors.size() != params->size())
    throw ConsistencyError(path + ": checkpoint holds " + std::to_string(tensors.size()) +
                           " tensors, model expects " + std::to_string(params->size()));
  for (auto &[name, p] : *params) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw ConsistencyError(path + ": missing tensor '" + name + "'");
    if (it->second.rows() != p.value.rows() || it->second.cols() != p.value.cols())
      throw DimensionError(path + ": tensor '" + name + "' has shape " +
                           it->second.ShapeString() + ", model expects " +
                           p.value.ShapeString());
    p.value = Cast<Real>(it->second);
  }
}

template std::string EncodeCheckpoint(const ParamStore<float> &);
template std::string EncodeCheckpoint(const ParamStore<double> &);
template void SaveCheckpoint(const std::string &, const ParamStore<float> &);
template void SaveCheckpoint(const std::string &, const ParamStore<double> &);
template void LoadCheckpointInto(const std::string &, ParamStore<float> *);
template void LoadCheckpointInto(const std::string &, ParamStore<double> *);

}  // namespace predcode
