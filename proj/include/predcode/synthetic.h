// predcode/synthetic.h

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

#ifndef PREDCODE_SYNTHETIC_H_
#define PREDCODE_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "predcode/corpus.h"

namespace predcode {

// Speech-like corpus with known structure.  Each phone has a fixed template
// vector, each speaker a fixed offset vector and a gender (templates and
// offsets are each centered over their rows).  An utterance is a Markov
// chain of phone segments with geometric dwell times, rendered as
//   x_t = a * x_{t-1} + (1 - a) * (template[phone_t] + offset[speaker]) + noise.
struct SynthConfig {
  size_t n_speakers = 20;
  size_t n_phones = 10;
  size_t utterances_per_speaker = 20;
  size_t frames_per_utterance = 100;
  size_t feature_dim = 80;
  double phone_dwell = 8.0;         // mean frames per segment, >= 1
  double speaker_offset_scale = 1.0;
  double noise_sigma = 0.3;
  double smoothing = 0.7;           // a, in [0, 1)
  uint64_t seed = 0;

  void Validate() const;  // ConfigError on violation
};

struct SyntheticCorpus {
  Corpus corpus;
  Matrix<double> templates;        // n_phones x dim
  Matrix<double> speaker_offsets;  // n_speakers x dim, row i is speaker i
  Matrix<double> transitions;      // n_phones x n_phones, zero diagonal
  SynthConfig config;
};

SyntheticCorpus GenerateSyntheticCorpus(const SynthConfig &cfg);

// Generation-time oracle: undo the temporal smoothing with the known
// coefficient, subtract the true speaker offset and pick the nearest
// template.  Returns frame accuracy over the whole corpus.  Only meaningful
// on the raw (unnormalized) generated frames.
double OracleFrameAccuracy(const SyntheticCorpus &synth);

}  // namespace predcode

#endif  // PREDCODE_SYNTHETIC_H_
