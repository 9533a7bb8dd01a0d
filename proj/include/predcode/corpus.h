// predcode/corpus.h

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

#ifndef PREDCODE_CORPUS_H_
#define PREDCODE_CORPUS_H_

#include <map>
#include <string>
#include <vector>

#include "predcode/feature_sequence.h"

namespace predcode {

enum class Gender { kFemale, kMale };

char GenderCode(Gender g);          // 'F' / 'M'
Gender ParseGender(const std::string &s);  // "F" / "M", else ParseError

struct Corpus {
  std::vector<FeatureSequence> utterances;
  std::map<std::string, Gender> speaker_gender;
};

// Feature file (binary, little-endian):
//   "FEAT1", utterance_id and speaker_id (u64 length + UTF-8 bytes),
//   T and D as u64, T*D float32 row-major, then a flag byte (0/1) and, when
//   set, T int32 phone labels.
std::string EncodeFeatures(const FeatureSequence &seq);
FeatureSequence DecodeFeatures(const std::string &bytes, const std::string &source);
void SaveFeatures(const std::string &path, const FeatureSequence &seq);
FeatureSequence LoadFeatures(const std::string &path);

// One manifest line: utterance_id, feature_path, speaker_id, gender,
// label_path ("-" when absent), tab separated.
struct ManifestRecord {
  std::string utterance_id;
  std::string feature_path;
  std::string speaker_id;
  Gender gender = Gender::kFemale;
  std::string label_path;  // empty when absent
};

std::vector<ManifestRecord> ParseManifest(const std::string &text, const std::string &source);
std::vector<ManifestRecord> LoadManifest(const std::string &path);
std::string FormatManifest(const std::vector<ManifestRecord> &records);

// Label files hold whitespace-separated integers, one per frame.
std::vector<int32_t> LoadLabels(const std::string &path);
std::string FormatLabels(const std::vector<int32_t> &labels);

// Loads every record of a manifest.  Relative paths resolve against the
// manifest's directory; a label file, when given, replaces embedded labels.
Corpus LoadCorpus(const std::string &manifest_path);

// Writes features (and label files when labels exist) under dir and returns
// the manifest records, with paths relative to dir.
std::vector<ManifestRecord> SaveCorpus(const Corpus &corpus, const std::string &dir,
                                       bool write_label_files);

}  // namespace predcode

#endif  // PREDCODE_CORPUS_H_
