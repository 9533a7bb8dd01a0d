// src/batching.cc

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

#include "predcode/batching.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "predcode/errors.h"

namespace predcode {

namespace {

struct Slice {
  size_t index;
  size_t start;
  size_t length;
};

Batch PackSlices(const std::vector<FeatureSequence> &corpus, const std::vector<Slice> &slices,
                 size_t fixed_len) {
  if (slices.empty()) throw EmptyInputError("cannot pack an empty batch");
  Batch batch;
  batch.size = slices.size();
  batch.dim = corpus[slices.front().index].dim();
  batch.max_len = fixed_len;
  for (const auto &s : slices) batch.max_len = std::max(batch.max_len, s.length);
  batch.frames.Resize(batch.max_len * batch.size, batch.dim);
  for (size_t b = 0; b < slices.size(); ++b) {
    const auto &s = slices[b];
    const auto &seq = corpus[s.index];
    if (seq.dim() != batch.dim)
      throw DimensionError("utterance '" + seq.utterance_id + "' has dimension " +
                           std::to_string(seq.dim()) + ", batch has " + std::to_string(batch.dim));
    for (size_t t = 0; t < s.length; ++t) {
      auto src = seq.frames.row(s.start + t);
      std::copy(src.begin(), src.end(), batch.frames.row(batch.Row(b, t)).begin());
    }
    batch.lengths.push_back(s.length);
    batch.corpus_indices.push_back(s.index);
    batch.chunk_starts.push_back(s.start);
    batch.utterance_ids.push_back(seq.utterance_id);
    batch.speaker_ids.push_back(seq.speaker_id);
    if (seq.phone_labels)
      batch.labels.emplace_back(seq.phone_labels->begin() + s.start,
                                seq.phone_labels->begin() + s.start + s.length);
    else
      batch.labels.emplace_back();
  }
  return batch;
}

}  // namespace

Batch PackBatch(const std::vector<FeatureSequence> &corpus, std::span<const size_t> indices) {
  std::vector<Slice> slices;
  for (size_t i : indices) {
    if (i >= corpus.size()) throw LookupError("utterance index out of range");
    slices.push_back({i, 0, corpus[i].num_frames()});
  }
  return PackSlices(corpus, slices, 0);
}

std::vector<Batch> MakeBatches(const std::vector<FeatureSequence> &corpus,
                               const BatchOptions &options, uint64_t seed, uint64_t epoch) {
  if (options.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (corpus.empty()) throw EmptyInputError("cannot batch an empty corpus");
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + epoch);

  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Slice> slices;
  slices.reserve(order.size());
  if (options.mode == BatchMode::kPadded) {
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return corpus[a].num_frames() < corpus[b].num_frames();
    });
    for (size_t i : order) slices.push_back({i, 0, corpus[i].num_frames()});
  } else {
    if (options.chunk_length < 1) throw ConfigError("chunk_length must be >= 1");
    for (size_t i : order) {
      const size_t len = corpus[i].num_frames();
      if (len < options.chunk_length) {
        if (!options.pad_short_chunks)
          throw ContractError("utterance '" + corpus[i].utterance_id + "' has " +
                              std::to_string(len) + " frames, shorter than chunk length " +
                              std::to_string(options.chunk_length));
        slices.push_back({i, 0, len});
        continue;
      }
      std::uniform_int_distribution<size_t> start(0, len - options.chunk_length);
      slices.push_back({i, start(rng), options.chunk_length});
    }
  }

  std::vector<Batch> batches;
  const size_t fixed = options.mode == BatchMode::kChunked ? options.chunk_length : 0;
  for (size_t begin = 0; begin < slices.size(); begin += options.batch_size) {
    std::vector<Slice> group(slices.begin() + begin,
                             slices.begin() + std::min(slices.size(), begin + options.batch_size));
    batches.push_back(PackSlices(corpus, group, fixed));
  }
  std::shuffle(batches.begin(), batches.end(), rng);
  return batches;
}

}  // namespace predcode
