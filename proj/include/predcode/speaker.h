// predcode/speaker.h

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

#ifndef PREDCODE_SPEAKER_H_
#define PREDCODE_SPEAKER_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "predcode/corpus.h"
#include "predcode/matrix.h"

namespace predcode {

// Mean over time of a T x F representation.
std::vector<double> UtteranceEmbed(const Matrix<float> &features);

// Fisher LDA projection: x -> projection^T (x - mean).
struct LdaModel {
  std::vector<double> mean;
  Matrix<double> projection;  // F x p, columns are Sw-orthonormal
  std::vector<double> eigenvalues;  // descending, length p
  std::vector<std::string> classes;

  size_t input_dim() const { return mean.size(); }
  size_t output_dim() const { return projection.cols(); }
  std::vector<double> Project(std::span<const double> x) const;
};

// Generalized eigenvectors of (between-class, within-class) scatter with the
// within-class scatter regularized by 1e-6 * trace / F on the diagonal; the
// top-p by eigenvalue are kept.  Requires >= 2 classes, >= 2 samples per
// class and p <= min(F, classes - 1).
LdaModel FitLda(const std::vector<std::vector<double>> &embeddings,
                const std::vector<std::string> &labels, size_t out_dim);

// a.b / (|a| |b|); a zero vector scores 0 and sets *degenerate.
double CosineScore(std::span<const double> a, std::span<const double> b,
                   bool *degenerate = nullptr);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
  size_t num_target = 0;
  size_t num_nontarget = 0;
};

// Thresholds are the distinct observed scores.  FAR = fraction of
// nontargets >= thr, FRR = fraction of targets < thr.  The reported EER is
// (FAR + FRR) / 2 at the threshold minimizing |FAR - FRR| (lowest such
// threshold on ties).
EerResult ComputeEer(std::span<const double> target_scores,
                     std::span<const double> nontarget_scores);

struct Trial {
  std::string utterance_a;
  std::string utterance_b;
  bool same_speaker = false;
  Gender gender = Gender::kFemale;  // both sides share it
};

struct UtteranceInfo {
  std::string utterance_id;
  std::string speaker_id;
  Gender gender = Gender::kFemale;
};

struct TrialList {
  std::vector<Trial> trials;
  std::vector<std::string> warnings;
  size_t num_target() const;
};

// All same-speaker pairs plus, for each speaker, up to max_per_speaker
// sampled pairs against other speakers of the same gender.  A gender with
// fewer than two speakers is skipped with a warning.  Never emits
// cross-gender pairs.
TrialList BuildTrials(const std::vector<UtteranceInfo> &utterances, uint64_t seed,
                      size_t max_per_speaker);

// Trial files: "utt_a utt_b label gender" with label target/nontarget and
// gender FF/MM.  Score files: "utt_a utt_b score label".
std::string FormatTrials(const TrialList &trials);
TrialList ParseTrials(const std::string &text, const std::string &source);

}  // namespace predcode

#endif  // PREDCODE_SPEAKER_H_
