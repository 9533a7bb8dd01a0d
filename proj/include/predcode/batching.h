// predcode/batching.h

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

#ifndef PREDCODE_BATCHING_H_
#define PREDCODE_BATCHING_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "predcode/feature_sequence.h"

namespace predcode {

// A padded mini-batch in time-major layout: row t * size + b of `frames`
// holds frame t of utterance b.  Frames at t >= lengths[b] are zero and are
// masked by every loss.
struct Batch {
  size_t size = 0;
  size_t max_len = 0;
  size_t dim = 0;
  Matrix<float> frames;
  std::vector<size_t> lengths;
  std::vector<size_t> corpus_indices;
  std::vector<size_t> chunk_starts;  // offset of frame 0 in the source utterance
  std::vector<std::string> utterance_ids;
  std::vector<std::string> speaker_ids;
  std::vector<std::vector<int32_t>> labels;  // per utterance, empty when unlabeled

  size_t Row(size_t b, size_t t) const { return t * size + b; }
  std::span<const float> Frame(size_t b, size_t t) const { return frames.row(Row(b, t)); }
};

enum class BatchMode { kPadded, kChunked };

struct BatchOptions {
  size_t batch_size = 32;
  BatchMode mode = BatchMode::kPadded;
  size_t chunk_length = 128;
  // Chunked mode: utterances shorter than chunk_length are rejected unless
  // this is set, in which case they are taken whole and padded.
  bool pad_short_chunks = false;
};

// Packs the given utterances (whole) into one padded batch.
Batch PackBatch(const std::vector<FeatureSequence> &corpus, std::span<const size_t> indices);

// One epoch of batches.  Padded mode shuffles, buckets by length (stable
// sort on length after the shuffle) and zero-pads; chunked mode draws one
// uniform chunk start per utterance.  Batch order and composition depend
// only on (seed, epoch).  Every utterance appears exactly once.
std::vector<Batch> MakeBatches(const std::vector<FeatureSequence> &corpus,
                               const BatchOptions &options, uint64_t seed, uint64_t epoch);

}  // namespace predcode

#endif  // PREDCODE_BATCHING_H_
