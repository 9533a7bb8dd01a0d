// src/pipeline.cc

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

#include "predcode/pipeline.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "predcode/errors.h"

namespace predcode {

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename Fn>
std::vector<FeatureSequence> MapFrames(const std::vector<FeatureSequence> &corpus, Fn fn) {
  std::vector<FeatureSequence> out;
  out.reserve(corpus.size());
  for (const auto &seq : corpus) {
    FeatureSequence f;
    f.utterance_id = seq.utterance_id;
    f.speaker_id = seq.speaker_id;
    f.phone_labels = seq.phone_labels;
    f.frames = fn(seq.frames);
    if (!f.frames.AllFinite())
      throw NumericalError("non-finite representation for utterance '" + seq.utterance_id + "'");
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

std::vector<FeatureSequence> ExtractApcFeatures(const ApcModel<float> &model,
                                                const std::vector<FeatureSequence> &corpus,
                                                size_t layer) {
  return MapFrames(corpus, [&](const Matrix<float> &x) { return model.Extract(x, layer); });
}

std::vector<FeatureSequence> ExtractCpcFeatures(const CpcModel<float> &model,
                                                const std::vector<FeatureSequence> &corpus,
                                                FeatureTap tap) {
  return MapFrames(corpus, [&](const Matrix<float> &x) { return model.Extract(x, tap); });
}

UtteranceSplit SplitUtterances(size_t count, uint64_t seed) {
  std::vector<size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  size_t n_dev = count / 10, n_test = count / 10;
  if (count >= 3) n_dev = std::max<size_t>(n_dev, 1), n_test = std::max<size_t>(n_test, 1);
  UtteranceSplit split;
  split.test.assign(order.begin(), order.begin() + n_test);
  split.dev.assign(order.begin() + n_test, order.begin() + n_test + n_dev);
  split.train.assign(order.begin() + n_test + n_dev, order.end());
  for (auto *part : {&split.train, &split.dev, &split.test}) std::sort(part->begin(), part->end());
  return split;
}

ProbeDataset FramesToDataset(const std::vector<FeatureSequence> &corpus,
                             const std::vector<size_t> &indices) {
  size_t frames = 0, dim = 0;
  for (size_t i : indices) {
    const auto &seq = corpus.at(i);
    if (!seq.phone_labels)
      throw MissingInputError("utterance '" + seq.utterance_id + "' has no phone labels");
    if (frames == 0 && dim == 0) dim = seq.dim();
    if (seq.dim() != dim)
      throw DimensionError("utterance '" + seq.utterance_id + "' has width " +
                           std::to_string(seq.dim()) + ", expected " + std::to_string(dim));
    frames += seq.num_frames();
  }
  ProbeDataset data;
  data.features.Resize(frames, dim);
  data.labels.reserve(frames);
  size_t row = 0;
  for (size_t i : indices) {
    const auto &seq = corpus[i];
    std::copy(seq.frames.data(), seq.frames.data() + seq.frames.size(),
              data.features.data() + row * dim);
    data.labels.insert(data.labels.end(), seq.phone_labels->begin(), seq.phone_labels->end());
    row += seq.num_frames();
  }
  return data;
}

size_t CountPhoneClasses(const std::vector<FeatureSequence> &corpus) {
  int32_t top = -1;
  for (const auto &seq : corpus)
    if (seq.phone_labels)
      for (int32_t l : *seq.phone_labels) {
        if (l < 0) throw ContractError("negative phone label in '" + seq.utterance_id + "'");
        top = std::max(top, l);
      }
  if (top < 0) throw MissingInputError("corpus carries no phone labels");
  return static_cast<size_t>(top) + 1;
}

PhoneProbeResult RunPhoneProbe(const std::vector<FeatureSequence> &corpus, ProbeKind kind,
                               const ProbeTrainConfig &cfg, uint64_t split_seed) {
  if (corpus.size() < 3) throw EmptyInputError("phone probing needs at least 3 utterances");
  const UtteranceSplit split = SplitUtterances(corpus.size(), split_seed);
  const ProbeDataset train = FramesToDataset(corpus, split.train);
  const ProbeDataset dev = FramesToDataset(corpus, split.dev);
  const ProbeDataset test = FramesToDataset(corpus, split.test);
  PhoneProbeResult r;
  r.kind = kind;
  r.num_classes = CountPhoneClasses(corpus);
  r.train_frames = train.size();
  r.dev_frames = dev.size();
  r.test_frames = test.size();
  ProbeTrainStats stats;
  Classifier<float> probe = TrainProbe<float>(train, &dev, kind, r.num_classes, cfg, &stats);
  r.train_accuracy = 1.0 - FrameErrorRate(probe, train);
  r.dev_accuracy = stats.best_dev_accuracy;
  r.test_error_rate = FrameErrorRate(probe, test);
  r.epochs_run = stats.epochs_run;
  return r;
}

SpeakerTrialSetup MakeSpeakerTrials(const Corpus &corpus, uint64_t seed,
                                    size_t max_nontarget_per_speaker) {
  std::mt19937_64 rng(seed);
  SpeakerTrialSetup setup;
  std::set<std::string> eval;
  for (Gender g : {Gender::kFemale, Gender::kMale}) {
    std::vector<std::string> speakers;
    for (const auto &[spk, gen] : corpus.speaker_gender)
      if (gen == g) speakers.push_back(spk);
    std::shuffle(speakers.begin(), speakers.end(), rng);
    for (size_t i = 0; i < speakers.size(); ++i) {
      if (i % 2 == 0) setup.lda_speakers.push_back(speakers[i]);
      else setup.eval_speakers.push_back(speakers[i]), eval.insert(speakers[i]);
    }
  }
  std::sort(setup.lda_speakers.begin(), setup.lda_speakers.end());
  std::sort(setup.eval_speakers.begin(), setup.eval_speakers.end());
  std::vector<UtteranceInfo> infos;
  for (const auto &seq : corpus.utterances) {
    if (!eval.count(seq.speaker_id)) continue;
    auto it = corpus.speaker_gender.find(seq.speaker_id);
    if (it == corpus.speaker_gender.end())
      throw LookupError("no gender for speaker '" + seq.speaker_id + "'");
    infos.push_back({seq.utterance_id, seq.speaker_id, it->second});
  }
  setup.trials = BuildTrials(infos, rng(), max_nontarget_per_speaker);
  return setup;
}

SpeakerVerificationResult RunSpeakerVerification(const std::vector<FeatureSequence> &corpus,
                                                 const TrialList &trials,
                                                 size_t max_lda_dim) {
  if (trials.trials.empty()) throw EmptyInputError("no trials to score");
  std::map<std::string, size_t> by_utt;
  for (size_t i = 0; i < corpus.size(); ++i) by_utt[corpus[i].utterance_id] = i;
  std::set<std::string> trial_speakers;
  auto lookup = [&](const std::string &utt) -> size_t {
    auto it = by_utt.find(utt);
    if (it == by_utt.end()) throw LookupError("trial utterance '" + utt + "' not in features");
    return it->second;
  };
  for (const auto &t : trials.trials) {
    trial_speakers.insert(corpus[lookup(t.utterance_a)].speaker_id);
    trial_speakers.insert(corpus[lookup(t.utterance_b)].speaker_id);
  }

  std::vector<std::vector<double>> embeddings(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) embeddings[i] = UtteranceEmbed(corpus[i].frames);

  std::vector<std::vector<double>> lda_x;
  std::vector<std::string> lda_y;
  std::set<std::string> lda_speakers;
  for (size_t i = 0; i < corpus.size(); ++i)
    if (!trial_speakers.count(corpus[i].speaker_id)) {
      lda_x.push_back(embeddings[i]);
      lda_y.push_back(corpus[i].speaker_id);
      lda_speakers.insert(corpus[i].speaker_id);
    }
  if (lda_speakers.size() < 2)
    throw ContractError("LDA needs at least 2 speakers outside the trial list, found " +
                        std::to_string(lda_speakers.size()));
  const size_t dim = embeddings.front().size();
  const size_t p = std::min({max_lda_dim, lda_speakers.size() - 1, dim});
  const LdaModel lda = FitLda(lda_x, lda_y, p);

  std::map<size_t, std::vector<double>> projected;
  auto project = [&](size_t i) -> const std::vector<double> & {
    auto it = projected.find(i);
    if (it == projected.end()) it = projected.emplace(i, lda.Project(embeddings[i])).first;
    return it->second;
  };
  SpeakerVerificationResult r;
  r.lda_dim = p;
  r.lda_speakers = lda_speakers.size();
  std::vector<double> target, nontarget;
  for (const auto &t : trials.trials) {
    bool degenerate = false;
    const double s = CosineScore(project(lookup(t.utterance_a)), project(lookup(t.utterance_b)),
                                 &degenerate);
    if (degenerate) ++r.degenerate_scores;
    r.scores.push_back({t, s});
    (t.same_speaker ? target : nontarget).push_back(s);
  }
  r.eer = ComputeEer(target, nontarget);
  return r;
}

std::string FormatScores(const std::vector<ScoredTrial> &scores) {
  std::string out;
  for (const auto &s : scores)
    out += s.trial.utterance_a + ' ' + s.trial.utterance_b + ' ' + FormatDouble(s.score) + ' ' +
           (s.trial.same_speaker ? "target" : "nontarget") + '\n';
  return out;
}

std::string ConfigHash(const KeyValues &config) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto &[k, v] : config) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string FormatReport(const std::vector<ReportRecord> &records, const std::string &config_hash,
                         uint64_t seed) {
  std::string out;
  for (const auto &r : records) {
    out += "metric=" + r.metric + " value=" + FormatDouble(r.value) +
           " config_hash=" + config_hash + " seed=" + std::to_string(seed);
    for (const auto &[k, v] : r.extras) out += ' ' + k + '=' + v;
    out += '\n';
  }
  return out;
}

std::string FormatLossHistory(const std::vector<double> &losses) {
  std::string out;
  for (size_t i = 0; i < losses.size(); ++i)
    out += std::to_string(i + 1) + ' ' + FormatDouble(losses[i]) + '\n';
  return out;
}

std::string LossCurveSvg(const std::vector<double> &losses, const std::string &title) {
  const double width = 640, height = 400, margin = 50;
  double lo = 0, hi = 1;
  if (!losses.empty()) {
    lo = *std::min_element(losses.begin(), losses.end());
    hi = *std::max_element(losses.begin(), losses.end());
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  auto label = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return std::string(buf);
  };
  std::string points;
  const size_t n = losses.size();
  for (size_t i = 0; i < n; ++i) {
    const double x = margin + (n > 1 ? (width - 2 * margin) * i / (n - 1) : 0.0);
    const double y = height - margin - (height - 2 * margin) * (losses[i] - lo) / (hi - lo);
    points += (i ? " " : "") + fmt(x) + "," + fmt(y);
  }
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
         "viewBox=\"0 0 640 400\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" + title + "</text>\n";
  svg += "<line x1=\"50\" y1=\"350\" x2=\"590\" y2=\"350\" stroke=\"black\"/>\n";
  svg += "<line x1=\"50\" y1=\"50\" x2=\"50\" y2=\"350\" stroke=\"black\"/>\n";
  svg += "<text x=\"46\" y=\"54\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">" + label(hi) + "</text>\n";
  svg += "<text x=\"46\" y=\"350\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">" + label(lo) + "</text>\n";
  svg += "<text x=\"320\" y=\"380\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">epoch (1.." + std::to_string(n) + ")</text>\n";
  if (n > 0)
    svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" + points +
           "\"/>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace predcode
