// predcode/feature_sequence.h

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

#ifndef PREDCODE_FEATURE_SEQUENCE_H_
#define PREDCODE_FEATURE_SEQUENCE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "predcode/matrix.h"

namespace predcode {

// One utterance: T frames of D features, optionally with a phone label per
// frame (labels->size() == frames.rows()).
struct FeatureSequence {
  std::string utterance_id;
  std::string speaker_id;
  Matrix<float> frames;
  std::optional<std::vector<int32_t>> phone_labels;

  size_t num_frames() const { return frames.rows(); }
  size_t dim() const { return frames.cols(); }
  bool operator==(const FeatureSequence &) const = default;
};

}  // namespace predcode

#endif  // PREDCODE_FEATURE_SEQUENCE_H_
