// src/frontend.cc

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

#include "predcode/frontend.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "predcode/errors.h"

namespace predcode {

void MelConfig::Validate(int sample_rate) const {
  if (window == 0 || hop == 0) throw ConfigError("window and hop must be positive");
  if (window > fft_size) throw ConfigError("window larger than fft_size");
  if (n_mels < 1) throw ConfigError("n_mels must be at least 1");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0))
    throw ConfigError("need 0 <= fmin < fmax <= sample_rate / 2");
  if (!(log_floor > 0.0)) throw ConfigError("log_floor must be positive");
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> MelBreakpoints(const MelConfig &cfg) {
  const double lo = HzToMel(cfg.fmin), hi = HzToMel(cfg.fmax);
  std::vector<double> points(cfg.n_mels + 2);
  for (size_t i = 0; i < points.size(); ++i)
    points[i] = MelToHz(lo + (hi - lo) * static_cast<double>(i) / (cfg.n_mels + 1));
  return points;
}

Matrix<double> MelFilterbank(const MelConfig &cfg, int sample_rate) {
  const auto points = MelBreakpoints(cfg);
  const size_t num_bins = cfg.fft_size / 2 + 1;
  Matrix<double> bank(cfg.n_mels, num_bins);
  for (size_t m = 0; m < cfg.n_mels; ++m) {
    const double left = points[m], center = points[m + 1], right = points[m + 2];
    for (size_t k = 0; k < num_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / cfg.fft_size;
      double w = 0.0;
      if (f > left && f <= center) w = (f - left) / (center - left);
      else if (f > center && f < right) w = (right - f) / (right - center);
      bank(m, k) = w;
    }
  }
  return bank;
}

std::vector<std::vector<double>> FrameSignal(const Waveform &wave, size_t window, size_t hop) {
  if (window == 0 || hop == 0) throw ConfigError("window and hop must be positive");
  const size_t len = wave.samples.size();
  if (len < window)
    throw EmptyInputError("waveform of " + std::to_string(len) +
                          " samples is shorter than one window (" + std::to_string(window) + ")");
  const size_t count = (len - window) / hop + 1;
  std::vector<double> hann(window);
  for (size_t n = 0; n < window; ++n)
    hann[n] = window == 1 ? 1.0
                          : 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / (window - 1));
  std::vector<std::vector<double>> frames(count, std::vector<double>(window));
  for (size_t i = 0; i < count; ++i)
    for (size_t n = 0; n < window; ++n) frames[i][n] = wave.samples[i * hop + n] * hann[n];
  return frames;
}

namespace {

class RealFft {
 public:
  explicit RealFft(size_t n)
      : n_(n),
        in_(fftw_alloc_real(n)),
        out_(fftw_alloc_complex(n / 2 + 1)),
        plan_(fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE)) {}
  ~RealFft() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  // Zero-pads the frame to n and returns |X_k| for k = 0..n/2.
  void Magnitude(const std::vector<double> &frame, std::vector<double> *mag) {
    std::fill(in_, in_ + n_, 0.0);
    std::copy(frame.begin(), frame.end(), in_);
    fftw_execute(plan_);
    mag->resize(n_ / 2 + 1);
    for (size_t k = 0; k <= n_ / 2; ++k) (*mag)[k] = std::hypot(out_[k][0], out_[k][1]);
  }

 private:
  size_t n_;
  double *in_;
  fftw_complex *out_;
  fftw_plan plan_;
};

}  // namespace

FeatureSequence LogMel(const Waveform &wave, const MelConfig &cfg,
                       const std::string &utterance_id, const std::string &speaker_id) {
  cfg.Validate(wave.sample_rate);
  for (double s : wave.samples)
    if (!std::isfinite(s)) throw NumericalError("non-finite waveform sample");
  const auto frames = FrameSignal(wave, cfg.window, cfg.hop);
  const Matrix<double> bank = MelFilterbank(cfg, wave.sample_rate);

  FeatureSequence seq;
  seq.utterance_id = utterance_id;
  seq.speaker_id = speaker_id;
  seq.frames.Resize(frames.size(), cfg.n_mels);
  RealFft fft(cfg.fft_size);
  std::vector<double> mag;
  for (size_t t = 0; t < frames.size(); ++t) {
    fft.Magnitude(frames[t], &mag);
    for (size_t m = 0; m < cfg.n_mels; ++m) {
      double energy = 0.0;
      auto w = bank.row(m);
      for (size_t k = 0; k < mag.size(); ++k) energy += w[k] * mag[k];
      seq.frames(t, m) = static_cast<float>(std::log(std::max(energy, cfg.log_floor)));
    }
  }
  return seq;
}

namespace {
const char kPooledKey[] = "*";
}  // namespace

NormScope ParseNormScope(const std::string &name) {
  if (name == "speaker") return NormScope::kSpeaker;
  if (name == "global") return NormScope::kGlobal;
  throw ConfigError("normalization scope must be speaker or global, got '" + name + "'");
}

const char *NormScopeName(NormScope scope) {
  return scope == NormScope::kSpeaker ? "speaker" : "global";
}

std::string SpeakerStats::KeyFor(const std::string &speaker) const {
  return scope_ == NormScope::kGlobal ? kPooledKey : speaker;
}

SpeakerStats SpeakerStats::Compute(const std::vector<FeatureSequence> &corpus,
                                   NormScope scope) {
  SpeakerStats stats;
  stats.scope_ = scope;
  struct Acc {
    std::vector<double> sum, sq;
    size_t frames = 0;
  };
  std::map<std::string, Acc> acc;
  // Pass 1: means.
  for (const auto &seq : corpus) {
    if (seq.speaker_id.empty())
      throw ContractError("utterance '" + seq.utterance_id + "' has no speaker id");
    Acc &a = acc[stats.KeyFor(seq.speaker_id)];
    if (a.sum.empty()) a.sum.assign(seq.dim(), 0.0), a.sq.assign(seq.dim(), 0.0);
    if (a.sum.size() != seq.dim())
      throw DimensionError("utterance '" + seq.utterance_id + "' has dimension " +
                           std::to_string(seq.dim()) + ", speaker has " +
                           std::to_string(a.sum.size()));
    for (size_t t = 0; t < seq.num_frames(); ++t)
      for (size_t d = 0; d < seq.dim(); ++d) a.sum[d] += seq.frames(t, d);
    a.frames += seq.num_frames();
  }
  for (auto &[spk, a] : acc) {
    if (a.frames < 2)
      throw ContractError("speaker '" + spk + "' contributes fewer than 2 frames");
    DimStats &s = stats.stats_[spk];
    s.mean.resize(a.sum.size());
    for (size_t d = 0; d < a.sum.size(); ++d) s.mean[d] = a.sum[d] / a.frames;
  }
  // Pass 2: centered second moments.
  for (const auto &seq : corpus) {
    Acc &a = acc[stats.KeyFor(seq.speaker_id)];
    const auto &mean = stats.stats_[stats.KeyFor(seq.speaker_id)].mean;
    for (size_t t = 0; t < seq.num_frames(); ++t)
      for (size_t d = 0; d < seq.dim(); ++d) {
        const double c = seq.frames(t, d) - mean[d];
        a.sq[d] += c * c;
      }
  }
  for (auto &[spk, a] : acc) {
    DimStats &s = stats.stats_[spk];
    s.stddev.resize(a.sq.size());
    for (size_t d = 0; d < a.sq.size(); ++d) s.stddev[d] = std::sqrt(a.sq[d] / a.frames);
  }
  return stats;
}

const DimStats &SpeakerStats::at(const std::string &speaker) const {
  auto it = stats_.find(KeyFor(speaker));
  if (it == stats_.end()) throw LookupError("no normalization stats for speaker '" + speaker + "'");
  return it->second;
}

void SpeakerStats::Apply(FeatureSequence *seq) const {
  const DimStats &s = at(seq->speaker_id);
  if (s.mean.size() != seq->dim())
    throw DimensionError("utterance '" + seq->utterance_id + "' dimension mismatch with stats");
  for (size_t t = 0; t < seq->num_frames(); ++t)
    for (size_t d = 0; d < seq->dim(); ++d)
      seq->frames(t, d) = static_cast<float>((seq->frames(t, d) - s.mean[d]) /
                                             std::max(s.stddev[d], 1e-8));
}

SpeakerStats SpeakerNormalize(std::vector<FeatureSequence> *corpus, NormScope scope) {
  SpeakerStats stats = SpeakerStats::Compute(*corpus, scope);
  for (auto &seq : *corpus) stats.Apply(&seq);
  return stats;
}

}  // namespace predcode
