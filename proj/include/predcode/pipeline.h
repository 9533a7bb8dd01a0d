// predcode/pipeline.h

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

#ifndef PREDCODE_PIPELINE_H_
#define PREDCODE_PIPELINE_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "predcode/apc.h"
#include "predcode/corpus.h"
#include "predcode/cpc.h"
#include "predcode/probes.h"
#include "predcode/speaker.h"

namespace predcode {

// Replaces every utterance's frames with the chosen representation; ids and
// labels are carried over unchanged.  Extractors are only read.
std::vector<FeatureSequence> ExtractApcFeatures(const ApcModel<float> &model,
                                                const std::vector<FeatureSequence> &corpus,
                                                size_t layer);
std::vector<FeatureSequence> ExtractCpcFeatures(const CpcModel<float> &model,
                                                const std::vector<FeatureSequence> &corpus,
                                                FeatureTap tap);

struct UtteranceSplit {
  std::vector<size_t> train, dev, test;
};

// Shuffles utterance indices with the seed and cuts 80/10/10 (dev and test
// get at least one utterance each when the corpus has three or more).
UtteranceSplit SplitUtterances(size_t count, uint64_t seed);

// Stacks the frames (and labels) of the listed utterances.  Every listed
// utterance must carry labels.
ProbeDataset FramesToDataset(const std::vector<FeatureSequence> &corpus,
                             const std::vector<size_t> &indices);

// Largest label + 1 over the corpus.
size_t CountPhoneClasses(const std::vector<FeatureSequence> &corpus);

struct PhoneProbeResult {
  ProbeKind kind = ProbeKind::kLinear;
  size_t num_classes = 0;
  size_t train_frames = 0, dev_frames = 0, test_frames = 0;
  double train_accuracy = 0.0;
  double dev_accuracy = 0.0;
  double test_error_rate = 0.0;  // frame error rate on the test split
  size_t epochs_run = 0;
};

// Utterance-level 80/10/10 split, probe trained on train with early stopping
// on dev, frame error rate reported on test.
PhoneProbeResult RunPhoneProbe(const std::vector<FeatureSequence> &corpus, ProbeKind kind,
                               const ProbeTrainConfig &cfg, uint64_t split_seed);

// Splits speakers of each gender alternately (in shuffled order) into an
// LDA-training half and an evaluation half, then builds same-gender trials
// over the evaluation half.
struct SpeakerTrialSetup {
  std::vector<std::string> lda_speakers;
  std::vector<std::string> eval_speakers;
  TrialList trials;
};
SpeakerTrialSetup MakeSpeakerTrials(const Corpus &corpus, uint64_t seed,
                                    size_t max_nontarget_per_speaker);

struct ScoredTrial {
  Trial trial;
  double score = 0.0;
};

struct SpeakerVerificationResult {
  EerResult eer;
  size_t lda_dim = 0;
  size_t lda_speakers = 0;
  size_t degenerate_scores = 0;  // zero embeddings scored as 0
  std::vector<ScoredTrial> scores;
};

// Mean-pools every utterance, fits LDA with p = min(24, speakers - 1, F) on
// the utterances of speakers that appear in no trial, projects, and scores
// each trial with cosine similarity.
SpeakerVerificationResult RunSpeakerVerification(const std::vector<FeatureSequence> &corpus,
                                                 const TrialList &trials,
                                                 size_t max_lda_dim = 24);

// "utt_a utt_b score label" lines with target/nontarget labels.
std::string FormatScores(const std::vector<ScoredTrial> &scores);

// 64-bit FNV-1a over the canonical "key=value\n" rendering, as 16 hex digits.
std::string ConfigHash(const KeyValues &config);

// Line-delimited key=value report.  The leading fields are metric, value,
// config_hash and seed; extras follow in the given order.
struct ReportRecord {
  std::string metric;
  double value = 0.0;
  std::vector<std::pair<std::string, std::string>> extras;
};
std::string FormatReport(const std::vector<ReportRecord> &records, const std::string &config_hash,
                         uint64_t seed);

// Loss curve as a small standalone SVG document.
std::string LossCurveSvg(const std::vector<double> &losses, const std::string &title);

// "epoch loss" lines, epochs counted from 1.
std::string FormatLossHistory(const std::vector<double> &losses);

}  // namespace predcode

#endif  // PREDCODE_PIPELINE_H_
