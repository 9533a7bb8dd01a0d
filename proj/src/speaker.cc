// src/speaker.cc

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

#include "predcode/speaker.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "predcode/errors.h"

namespace predcode {

std::vector<double> UtteranceEmbed(const Matrix<float> &features) {
  if (features.rows() == 0) throw EmptyInputError("cannot embed an empty sequence");
  std::vector<double> mean(features.cols(), 0.0);
  for (size_t t = 0; t < features.rows(); ++t)
    for (size_t d = 0; d < features.cols(); ++d) mean[d] += features(t, d);
  for (double &m : mean) m /= static_cast<double>(features.rows());
  return mean;
}

std::vector<double> LdaModel::Project(std::span<const double> x) const {
  if (x.size() != mean.size())
    throw DimensionError("LDA expects width " + std::to_string(mean.size()) + ", got " +
                         std::to_string(x.size()));
  std::vector<double> out(projection.cols(), 0.0);
  for (size_t f = 0; f < x.size(); ++f) {
    const double c = x[f] - mean[f];
    for (size_t j = 0; j < out.size(); ++j) out[j] += projection(f, j) * c;
  }
  return out;
}

LdaModel FitLda(const std::vector<std::vector<double>> &embeddings,
                const std::vector<std::string> &labels, size_t out_dim) {
  if (embeddings.size() != labels.size())
    throw DimensionError("one speaker label per embedding required");
  if (embeddings.empty()) throw EmptyInputError("LDA on an empty set");
  const size_t dim = embeddings.front().size();
  std::map<std::string, std::vector<size_t>> by_class;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (embeddings[i].size() != dim) throw DimensionError("embedding width mismatch");
    by_class[labels[i]].push_back(i);
  }
  const size_t classes = by_class.size();
  if (classes < 2) throw ContractError("LDA needs at least 2 classes");
  for (const auto &[name, idx] : by_class)
    if (idx.size() < 2) throw ContractError("class '" + name + "' has fewer than 2 embeddings");
  if (out_dim < 1 || out_dim > std::min(dim, classes - 1))
    throw ContractError("LDA output dim " + std::to_string(out_dim) + " exceeds min(F=" +
                        std::to_string(dim) + ", classes-1=" + std::to_string(classes - 1) + ")");

  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  VectorXd mu = VectorXd::Zero(dim);
  for (const auto &e : embeddings) mu += Eigen::Map<const VectorXd>(e.data(), dim);
  mu /= static_cast<double>(embeddings.size());

  MatrixXd sw = MatrixXd::Zero(dim, dim), sb = MatrixXd::Zero(dim, dim);
  LdaModel model;
  for (const auto &[name, idx] : by_class) {
    model.classes.push_back(name);
    VectorXd mc = VectorXd::Zero(dim);
    for (size_t i : idx) mc += Eigen::Map<const VectorXd>(embeddings[i].data(), dim);
    mc /= static_cast<double>(idx.size());
    for (size_t i : idx) {
      VectorXd d = Eigen::Map<const VectorXd>(embeddings[i].data(), dim) - mc;
      sw.noalias() += d * d.transpose();
    }
    VectorXd dm = mc - mu;
    sb.noalias() += static_cast<double>(idx.size()) * dm * dm.transpose();
  }
  const double trace = sw.trace();
  if (!(trace > 0.0)) throw NumericalError("within-class scatter is zero; LDA is undefined");
  sw.diagonal().array() += 1e-6 * trace / static_cast<double>(dim);

  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> solver(sb, sw);
  if (solver.info() != Eigen::Success)
    throw NumericalError("within-class scatter is singular beyond regularization");
  // Eigenvalues ascend; take the last out_dim columns in reverse.
  model.mean.assign(mu.data(), mu.data() + dim);
  model.projection.Resize(dim, out_dim);
  for (size_t j = 0; j < out_dim; ++j) {
    const Eigen::Index col = static_cast<Eigen::Index>(dim - 1 - j);
    model.eigenvalues.push_back(solver.eigenvalues()(col));
    for (size_t f = 0; f < dim; ++f) model.projection(f, j) = solver.eigenvectors()(f, col);
  }
  if (!model.projection.AllFinite()) throw NumericalError("LDA produced non-finite directions");
  return model;
}

double CosineScore(std::span<const double> a, std::span<const double> b, bool *degenerate) {
  if (a.size() != b.size()) throw DimensionError("cosine score of vectors with different widths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const bool zero = na == 0.0 || nb == 0.0;
  if (degenerate) *degenerate = zero;
  if (zero) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

EerResult ComputeEer(std::span<const double> target_scores,
                     std::span<const double> nontarget_scores) {
  if (target_scores.empty() || nontarget_scores.empty())
    throw EmptyInputError("EER needs both target and nontarget scores");
  std::vector<double> tar(target_scores.begin(), target_scores.end());
  std::vector<double> non(nontarget_scores.begin(), nontarget_scores.end());
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());
  std::vector<double> thresholds(tar);
  thresholds.insert(thresholds.end(), non.begin(), non.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double n_tar = static_cast<double>(tar.size());
  const double n_non = static_cast<double>(non.size());
  EerResult best;
  best.num_target = tar.size();
  best.num_nontarget = non.size();
  double best_gap = std::numeric_limits<double>::infinity();
  size_t below_tar = 0, below_non = 0;  // scores strictly below the threshold
  for (double thr : thresholds) {
    while (below_tar < tar.size() && tar[below_tar] < thr) ++below_tar;
    while (below_non < non.size() && non[below_non] < thr) ++below_non;
    const double far = static_cast<double>(non.size() - below_non) / n_non;
    const double frr = static_cast<double>(below_tar) / n_tar;
    const double gap = std::abs(far - frr);
    if (gap < best_gap) {
      best_gap = gap;
      best.eer = (far + frr) / 2.0;
      best.threshold = thr;
    }
  }
  return best;
}

size_t TrialList::num_target() const {
  return static_cast<size_t>(
      std::count_if(trials.begin(), trials.end(), [](const Trial &t) { return t.same_speaker; }));
}

TrialList BuildTrials(const std::vector<UtteranceInfo> &utterances, uint64_t seed,
                      size_t max_per_speaker) {
  std::map<std::string, std::vector<size_t>> by_speaker;
  std::map<std::string, Gender> gender_of;
  for (size_t i = 0; i < utterances.size(); ++i) {
    const auto &u = utterances[i];
    auto [it, inserted] = gender_of.emplace(u.speaker_id, u.gender);
    if (!inserted && it->second != u.gender)
      throw ConsistencyError("speaker '" + u.speaker_id + "' listed with both genders");
    by_speaker[u.speaker_id].push_back(i);
  }
  TrialList out;
  std::mt19937_64 rng(seed);
  for (Gender g : {Gender::kFemale, Gender::kMale}) {
    std::vector<std::string> speakers;
    for (const auto &[spk, gen] : gender_of)
      if (gen == g) speakers.push_back(spk);
    if (speakers.empty()) continue;
    if (speakers.size() < 2) {
      out.warnings.push_back(std::string("only one ") + (g == Gender::kFemale ? "female" : "male") +
                             " speaker; skipping " + (g == Gender::kFemale ? "FF" : "MM") +
                             " trials");
      continue;
    }
    for (const auto &spk : speakers) {
      const auto &idx = by_speaker[spk];
      for (size_t a = 0; a < idx.size(); ++a)
        for (size_t b = a + 1; b < idx.size(); ++b)
          out.trials.push_back({utterances[idx[a]].utterance_id,
                                utterances[idx[b]].utterance_id, true, g});
    }
    // Nontarget pairs: for each speaker, draw distinct pairs (own utterance,
    // other same-gender speaker's utterance) with the other speaker sorted
    // after this one, so each unordered pair is considered once.
    for (size_t s = 0; s < speakers.size(); ++s) {
      std::vector<std::pair<size_t, size_t>> pool;
      for (size_t o = s + 1; o < speakers.size(); ++o)
        for (size_t a : by_speaker[speakers[s]])
          for (size_t b : by_speaker[speakers[o]]) pool.emplace_back(a, b);
      std::shuffle(pool.begin(), pool.end(), rng);
      if (pool.size() > max_per_speaker) pool.resize(max_per_speaker);
      std::sort(pool.begin(), pool.end());
      for (auto [a, b] : pool)
        out.trials.push_back({utterances[a].utterance_id, utterances[b].utterance_id, false, g});
    }
  }
  return out;
}

std::string FormatTrials(const TrialList &trials) {
  std::string out;
  for (const auto &t : trials.trials)
    out += t.utterance_a + ' ' + t.utterance_b + ' ' + (t.same_speaker ? "target" : "nontarget") +
           ' ' + (t.gender == Gender::kFemale ? "FF" : "MM") + '\n';
  return out;
}

TrialList ParseTrials(const std::string &text, const std::string &source) {
  TrialList out;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    Trial t;
    std::string label, gender, extra;
    if (!(ls >> t.utterance_a)) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!(ls >> t.utterance_b >> label >> gender) || (ls >> extra))
      throw ParseError(where + ": expected 'utt_a utt_b label gender'");
    if (label == "target") t.same_speaker = true;
    else if (label != "nontarget") throw ParseError(where + ": label must be target or nontarget");
    if (gender == "FF") t.gender = Gender::kFemale;
    else if (gender == "MM") t.gender = Gender::kMale;
    else throw ParseError(where + ": gender pair must be FF or MM");
    out.trials.push_back(std::move(t));
  }
  return out;
}

}  // namespace predcode
