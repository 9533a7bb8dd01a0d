// predcode/frontend.h

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

#ifndef PREDCODE_FRONTEND_H_
#define PREDCODE_FRONTEND_H_

#include <map>
#include <string>
#include <vector>

#include "predcode/feature_sequence.h"

namespace predcode {

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;
};

struct MelConfig {
  size_t window = 400;     // samples (25 ms at 16 kHz)
  size_t hop = 160;        // samples (10 ms)
  size_t fft_size = 512;
  size_t n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-10;

  // Throws ConfigError on a violated invariant.
  void Validate(int sample_rate) const;
};

double HzToMel(double hz);
double MelToHz(double mel);

// n_mels + 2 breakpoints (Hz): filter m spans [b[m], b[m+2]] with peak b[m+1].
std::vector<double> MelBreakpoints(const MelConfig &cfg);

// n_mels x (fft_size/2 + 1) triangular weights, peak value 1.
Matrix<double> MelFilterbank(const MelConfig &cfg, int sample_rate);

// Hann-windowed frames: floor((len - window) / hop) + 1 rows of window
// samples.  Throws EmptyInputError when the wave is shorter than a window.
std::vector<std::vector<double>> FrameSignal(const Waveform &wave, size_t window, size_t hop);

// Magnitude spectrum -> Mel filterbank -> natural log with a floor.
// Output is T x n_mels.
FeatureSequence LogMel(const Waveform &wave, const MelConfig &cfg,
                       const std::string &utterance_id = "",
                       const std::string &speaker_id = "");

// Per-speaker, per-dimension mean and population standard deviation.
struct DimStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

// kSpeaker keeps one set of statistics per speaker.  kGlobal pools every
// frame into a single set applied to all speakers, which preserves
// speaker-dependent offsets in the normalized features.
enum class NormScope { kSpeaker, kGlobal };

NormScope ParseNormScope(const std::string &name);
const char *NormScopeName(NormScope scope);

class SpeakerStats {
 public:
  // Throws ContractError if a speaker (or the pool) has fewer than two frames.
  static SpeakerStats Compute(const std::vector<FeatureSequence> &corpus,
                              NormScope scope = NormScope::kSpeaker);

  // x <- (x - mean) / max(std, 1e-8).  Unknown speaker -> LookupError.
  void Apply(FeatureSequence *seq) const;

  const DimStats &at(const std::string &speaker) const;
  const std::map<std::string, DimStats> &speakers() const { return stats_; }
  NormScope scope() const { return scope_; }

 private:
  std::string KeyFor(const std::string &speaker) const;

  NormScope scope_ = NormScope::kSpeaker;
  std::map<std::string, DimStats> stats_;
};

// Computes stats on the corpus and normalizes it in place; the stats are
// returned for held-out data from the same speakers.
SpeakerStats SpeakerNormalize(std::vector<FeatureSequence> *corpus,
                              NormScope scope = NormScope::kSpeaker);

}  // namespace predcode

#endif  // PREDCODE_FRONTEND_H_
