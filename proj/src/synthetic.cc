// src/synthetic.cc

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

#include "predcode/synthetic.h"

#include <cstdio>
#include <limits>
#include <random>

#include "predcode/errors.h"

namespace predcode {

void SynthConfig::Validate() const {
  if (n_speakers < 1 || n_phones < 1 || utterances_per_speaker < 1 ||
      frames_per_utterance < 1 || feature_dim < 1)
    throw ConfigError("synthetic corpus counts must all be >= 1");
  if (!(phone_dwell >= 1.0)) throw ConfigError("phone_dwell must be >= 1");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw ConfigError("smoothing must lie in [0, 1)");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  if (!(speaker_offset_scale >= 0.0)) throw ConfigError("speaker_offset_scale must be >= 0");
}

namespace {

std::string SpeakerName(size_t s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%03zu", s);
  return buf;
}

std::string UtteranceName(size_t s, size_t u) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "spk%03zu_utt%03zu", s, u);
  return buf;
}

size_t SampleRow(const Matrix<double> &probs, size_t row, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double r = unit(rng), acc = 0.0;
  size_t last = row;
  for (size_t j = 0; j < probs.cols(); ++j) {
    if (probs(row, j) <= 0.0) continue;
    acc += probs(row, j);
    last = j;
    if (r < acc) return j;
  }
  return last;
}

void CenterRows(Matrix<double> *m) {
  if (m->rows() < 2) return;
  for (size_t d = 0; d < m->cols(); ++d) {
    double mean = 0.0;
    for (size_t r = 0; r < m->rows(); ++r) mean += (*m)(r, d);
    mean /= static_cast<double>(m->rows());
    for (size_t r = 0; r < m->rows(); ++r) (*m)(r, d) -= mean;
  }
}

}  // namespace

SyntheticCorpus GenerateSyntheticCorpus(const SynthConfig &cfg) {
  cfg.Validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const size_t dim = cfg.feature_dim;

  SyntheticCorpus out;
  out.config = cfg;
  out.templates.Resize(cfg.n_phones, dim);
  for (auto &v : out.templates.values()) v = gauss(rng);
  out.speaker_offsets.Resize(cfg.n_speakers, dim);
  for (auto &v : out.speaker_offsets.values()) v = cfg.speaker_offset_scale * gauss(rng);
  // Center both sets across their rows so the corpus mean does not wander
  // with the seed; a single row is left as drawn.
  CenterRows(&out.templates);
  CenterRows(&out.speaker_offsets);

  out.transitions.Resize(cfg.n_phones, cfg.n_phones);
  for (size_t i = 0; i < cfg.n_phones; ++i) {
    double total = 0.0;
    for (size_t j = 0; j < cfg.n_phones; ++j) {
      if (i == j && cfg.n_phones > 1) continue;
      out.transitions(i, j) = 0.05 + unit(rng);
      total += out.transitions(i, j);
    }
    for (size_t j = 0; j < cfg.n_phones; ++j) out.transitions(i, j) /= total;
  }

  const double switch_prob = 1.0 / cfg.phone_dwell;
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma > 0 ? cfg.noise_sigma : 1.0);
  std::uniform_int_distribution<size_t> first_phone(0, cfg.n_phones - 1);
  for (size_t s = 0; s < cfg.n_speakers; ++s) {
    const std::string spk = SpeakerName(s);
    out.corpus.speaker_gender[spk] = s % 2 == 0 ? Gender::kFemale : Gender::kMale;
    auto offset = out.speaker_offsets.row(s);
    for (size_t u = 0; u < cfg.utterances_per_speaker; ++u) {
      FeatureSequence seq;
      seq.utterance_id = UtteranceName(s, u);
      seq.speaker_id = spk;
      seq.frames.Resize(cfg.frames_per_utterance, dim);
      std::vector<int32_t> labels(cfg.frames_per_utterance);
      size_t phone = first_phone(rng);
      std::vector<double> prev(dim);
      for (size_t d = 0; d < dim; ++d) prev[d] = out.templates(phone, d) + offset[d];
      for (size_t t = 0; t < cfg.frames_per_utterance; ++t) {
        if (t > 0 && unit(rng) < switch_prob) phone = SampleRow(out.transitions, phone, rng);
        labels[t] = static_cast<int32_t>(phone);
        for (size_t d = 0; d < dim; ++d) {
          double x = cfg.smoothing * prev[d] +
                     (1.0 - cfg.smoothing) * (out.templates(phone, d) + offset[d]);
          if (cfg.noise_sigma > 0) x += noise(rng);
          prev[d] = x;
          seq.frames(t, d) = static_cast<float>(x);
        }
      }
      seq.phone_labels = std::move(labels);
      out.corpus.utterances.push_back(std::move(seq));
    }
  }
  return out;
}

double OracleFrameAccuracy(const SyntheticCorpus &synth) {
  const double a = synth.config.smoothing;
  const size_t dim = synth.config.feature_dim;
  size_t correct = 0, total = 0;
  std::vector<double> target(dim);
  for (size_t i = 0; i < synth.corpus.utterances.size(); ++i) {
    const auto &seq = synth.corpus.utterances[i];
    const size_t spk = i / synth.config.utterances_per_speaker;
    auto offset = synth.speaker_offsets.row(spk);
    for (size_t t = 0; t < seq.num_frames(); ++t) {
      for (size_t d = 0; d < dim; ++d) {
        const double x = seq.frames(t, d);
        const double deconv =
            t == 0 ? x : (x - a * seq.frames(t - 1, d)) / (1.0 - a);
        target[d] = deconv - offset[d];
      }
      size_t best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (size_t p = 0; p < synth.templates.rows(); ++p) {
        double dist = 0.0;
        for (size_t d = 0; d < dim; ++d) {
          const double diff = target[d] - synth.templates(p, d);
          dist += diff * diff;
        }
        if (dist < best_dist) best_dist = dist, best = p;
      }
      correct += static_cast<int32_t>(best) == (*seq.phone_labels)[t];
      ++total;
    }
  }
  return total ? static_cast<double>(correct) / total : 0.0;
}

}  // namespace predcode
