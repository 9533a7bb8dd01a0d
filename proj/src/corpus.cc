// src/corpus.cc

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

#include "predcode/corpus.h"

#include <filesystem>
#include <set>
#include <sstream>

#include "predcode/binary_io.h"
#include "predcode/errors.h"

namespace predcode {

namespace fs = std::filesystem;

namespace {
constexpr char kFeatMagic[] = "FEAT1";
constexpr size_t kFeatMagicLen = 5;
}  // namespace

char GenderCode(Gender g) { return g == Gender::kFemale ? 'F' : 'M'; }

Gender ParseGender(const std::string &s) {
  if (s == "F" || s == "f") return Gender::kFemale;
  if (s == "M" || s == "m") return Gender::kMale;
  throw ParseError("gender must be F or M, got '" + s + "'");
}

std::string EncodeFeatures(const FeatureSequence &seq) {
  if (seq.phone_labels && seq.phone_labels->size() != seq.num_frames())
    throw DimensionError("utterance '" + seq.utterance_id + "' has " +
                         std::to_string(seq.phone_labels->size()) + " labels for " +
                         std::to_string(seq.num_frames()) + " frames");
  std::string out(kFeatMagic, kFeatMagicLen);
  AppendLengthPrefixed(seq.utterance_id, &out);
  AppendLengthPrefixed(seq.speaker_id, &out);
  AppendU64(seq.num_frames(), &out);
  AppendU64(seq.dim(), &out);
  for (float v : seq.frames.values()) AppendF32(v, &out);
  out.push_back(seq.phone_labels ? 1 : 0);
  if (seq.phone_labels)
    for (int32_t l : *seq.phone_labels) AppendU32(static_cast<uint32_t>(l), &out);
  return out;
}

FeatureSequence DecodeFeatures(const std::string &bytes, const std::string &source) {
  ByteReader reader(bytes, source);
  if (reader.ReadBytes(kFeatMagicLen, "feature magic") != std::string(kFeatMagic, kFeatMagicLen))
    ByteReader(bytes, source).Fail("bad feature file magic (expected FEAT1)");
  FeatureSequence seq;
  seq.utterance_id = reader.ReadLengthPrefixed("utterance id");
  seq.speaker_id = reader.ReadLengthPrefixed("speaker id");
  const uint64_t t = reader.ReadU64("frame count");
  const uint64_t d = reader.ReadU64("feature dimension");
  if (d != 0 && t > reader.remaining() / 4 / d) reader.Fail("frame block larger than file");
  seq.frames.Resize(t, d);
  for (auto &v : seq.frames.values()) v = reader.ReadF32("frames");
  const uint8_t flag = reader.ReadU8("label flag");
  if (flag > 1) reader.Fail("label flag must be 0 or 1, got " + std::to_string(flag));
  if (flag == 1) {
    std::vector<int32_t> labels(t);
    for (auto &l : labels) l = static_cast<int32_t>(reader.ReadU32("phone labels"));
    seq.phone_labels = std::move(labels);
  }
  if (!reader.AtEnd()) reader.Fail("trailing bytes after feature record");
  return seq;
}

void SaveFeatures(const std::string &path, const FeatureSequence &seq) {
  AtomicWriteFile(path, EncodeFeatures(seq));
}

FeatureSequence LoadFeatures(const std::string &path) {
  return DecodeFeatures(ReadFileBytes(path), path);
}

std::vector<ManifestRecord> ParseManifest(const std::string &text, const std::string &source) {
  std::vector<ManifestRecord> records;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, '\t')) fields.push_back(field);
    const std::string where = source + ":" + std::to_string(line_no);
    if (fields.size() != 5)
      throw ParseError(where + ": expected 5 tab-separated fields, got " +
                       std::to_string(fields.size()));
    ManifestRecord r;
    r.utterance_id = fields[0];
    r.feature_path = fields[1];
    r.speaker_id = fields[2];
    try {
      r.gender = ParseGender(fields[3]);
    } catch (const ParseError &e) {
      throw ParseError(where + ": " + e.what());
    }
    r.label_path = fields[4] == "-" ? "" : fields[4];
    if (r.utterance_id.empty() || r.feature_path.empty() || r.speaker_id.empty())
      throw ParseError(where + ": empty required field");
    if (!seen.insert(r.utterance_id).second)
      throw ParseError(where + ": duplicate utterance id '" + r.utterance_id + "'");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ManifestRecord> LoadManifest(const std::string &path) {
  return ParseManifest(ReadFileBytes(path), path);
}

std::string FormatManifest(const std::vector<ManifestRecord> &records) {
  std::string out;
  for (const auto &r : records) {
    out += r.utterance_id + '\t' + r.feature_path + '\t' + r.speaker_id + '\t' +
           GenderCode(r.gender) + '\t' + (r.label_path.empty() ? "-" : r.label_path) + '\n';
  }
  return out;
}

std::vector<int32_t> LoadLabels(const std::string &path) {
  std::istringstream in(ReadFileBytes(path));
  std::vector<int32_t> labels;
  std::string tok;
  while (in >> tok) {
    try {
      size_t used = 0;
      long v = std::stol(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      labels.push_back(static_cast<int32_t>(v));
    } catch (const std::exception &) {
      throw ParseError(path + ": bad label token '" + tok + "' (label index " +
                       std::to_string(labels.size()) + ")");
    }
  }
  return labels;
}

std::string FormatLabels(const std::vector<int32_t> &labels) {
  std::string out;
  for (int32_t l : labels) out += std::to_string(l) + '\n';
  return out;
}

Corpus LoadCorpus(const std::string &manifest_path) {
  const auto records = LoadManifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  auto resolve = [&](const std::string &p) {
    fs::path path(p);
    return (path.is_absolute() ? path : base / path).string();
  };
  Corpus corpus;
  for (const auto &r : records) {
    const std::string feat_path = resolve(r.feature_path);
    if (!fs::exists(feat_path))
      throw MissingInputError("feature file '" + feat_path + "' for utterance '" +
                              r.utterance_id + "' does not exist");
    FeatureSequence seq = LoadFeatures(feat_path);
    if (seq.utterance_id != r.utterance_id || seq.speaker_id != r.speaker_id)
      throw ConsistencyError(feat_path + ": header ids (" + seq.utterance_id + ", " +
                             seq.speaker_id + ") disagree with manifest (" + r.utterance_id +
                             ", " + r.speaker_id + ")");
    if (!r.label_path.empty()) {
      const std::string label_path = resolve(r.label_path);
      if (!fs::exists(label_path))
        throw MissingInputError("label file '" + label_path + "' does not exist");
      auto labels = LoadLabels(label_path);
      if (labels.size() != seq.num_frames())
        throw DimensionError(label_path + ": " + std::to_string(labels.size()) +
                             " labels for " + std::to_string(seq.num_frames()) + " frames");
      seq.phone_labels = std::move(labels);
    }
    auto [it, inserted] = corpus.speaker_gender.emplace(r.speaker_id, r.gender);
    if (!inserted && it->second != r.gender)
      throw ConsistencyError("speaker '" + r.speaker_id + "' listed with both genders");
    corpus.utterances.push_back(std::move(seq));
  }
  return corpus;
}

std::vector<ManifestRecord> SaveCorpus(const Corpus &corpus, const std::string &dir,
                                       bool write_label_files) {
  fs::create_directories(fs::path(dir) / "feats");
  if (write_label_files) fs::create_directories(fs::path(dir) / "labels");
  std::vector<ManifestRecord> records;
  for (const auto &seq : corpus.utterances) {
    ManifestRecord r;
    r.utterance_id = seq.utterance_id;
    r.speaker_id = seq.speaker_id;
    auto g = corpus.speaker_gender.find(seq.speaker_id);
    if (g == corpus.speaker_gender.end())
      throw LookupError("no gender recorded for speaker '" + seq.speaker_id + "'");
    r.gender = g->second;
    r.feature_path = "feats/" + seq.utterance_id + ".feat";
    SaveFeatures((fs::path(dir) / r.feature_path).string(), seq);
    if (write_label_files && seq.phone_labels) {
      r.label_path = "labels/" + seq.utterance_id + ".lab";
      AtomicWriteFile((fs::path(dir) / r.label_path).string(), FormatLabels(*seq.phone_labels));
    }
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace predcode
