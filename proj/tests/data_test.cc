// tests/data_test.cc

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

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include <unistd.h>

#include "gtest/gtest.h"
#include "predcode/batching.h"
#include "predcode/binary_io.h"
#include "predcode/corpus.h"
#include "predcode/errors.h"
#include "predcode/synthetic.h"

namespace predcode {
namespace {

namespace fs = std::filesystem;

class DataDirTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const char *name = ::testing::UnitTest::GetInstance()->current_test_info()->name();
    dir_ = fs::temp_directory_path() /
           ("predcode_data_" + std::to_string(::getpid()) + "_" + name);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

FeatureSequence RandomSequence(size_t t, size_t d, bool labels, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0, 1);
  FeatureSequence s;
  s.utterance_id = "utt" + std::to_string(seed);
  s.speaker_id = "spk";
  s.frames.Resize(t, d);
  for (float &v : s.frames.values()) v = n(rng);
  if (labels) {
    s.phone_labels.emplace();
    for (size_t i = 0; i < t; ++i) s.phone_labels->push_back(static_cast<int32_t>(rng() % 7));
  }
  return s;
}

TEST_F(DataDirTest, FeatureRoundTripIsBitwise) {
  for (bool labels : {false, true}) {
    FeatureSequence s = RandomSequence(13, 5, labels, labels ? 1 : 2);
    const std::string path = (dir_ / "x.feat").string();
    SaveFeatures(path, s);
    FeatureSequence back = LoadFeatures(path);
    EXPECT_EQ(back, s);
    EXPECT_EQ(EncodeFeatures(back), ReadFileBytes(path));
  }
}

TEST(FeatureFormatTest, TruncationNamesOffset) {
  const std::string bytes = EncodeFeatures(RandomSequence(4, 3, true, 3));
  for (size_t cut : {3u, 10u, 30u, static_cast<unsigned>(bytes.size() - 1)}) {
    try {
      DecodeFeatures(bytes.substr(0, cut), "t.feat");
      FAIL() << "cut " << cut;
    } catch (const ParseError &e) {
      EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
    }
  }
  EXPECT_THROW(DecodeFeatures("FEAT2" + bytes.substr(5), "m"), ParseError);
  EXPECT_THROW(DecodeFeatures(bytes + "x", "m"), ParseError);
}

TEST(ManifestTest, DuplicateIdIsListed) {
  const std::string text = "u1\ta.feat\ts1\tF\t-\nu1\tb.feat\ts1\tF\t-\n";
  try {
    ParseManifest(text, "m.tsv");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("u1"), std::string::npos);
  }
}

TEST(ManifestTest, FormatParseRoundTrip) {
  std::vector<ManifestRecord> recs{{"u1", "f/u1.feat", "s1", Gender::kFemale, ""},
                                   {"u2", "f/u2.feat", "s2", Gender::kMale, "l/u2.lab"}};
  auto back = ParseManifest(FormatManifest(recs), "m");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].label_path, "");
  EXPECT_EQ(back[1].label_path, "l/u2.lab");
  EXPECT_EQ(back[1].gender, Gender::kMale);
  EXPECT_THROW(ParseManifest("u1\ta\ts\tX\t-\n", "m"), ParseError);
  EXPECT_THROW(ParseManifest("u1\ta\ts\n", "m"), ParseError);
}

TEST_F(DataDirTest, CorpusRoundTripAndMissingFile) {
  SynthConfig cfg;
  cfg.n_speakers = 3;
  cfg.utterances_per_speaker = 2;
  cfg.frames_per_utterance = 20;
  cfg.feature_dim = 4;
  SyntheticCorpus synth = GenerateSyntheticCorpus(cfg);
  auto recs = SaveCorpus(synth.corpus, dir_.string(), true);
  AtomicWriteFile((dir_ / "manifest.tsv").string(), FormatManifest(recs));
  Corpus back = LoadCorpus((dir_ / "manifest.tsv").string());
  ASSERT_EQ(back.utterances.size(), synth.corpus.utterances.size());
  for (size_t i = 0; i < back.utterances.size(); ++i)
    EXPECT_EQ(back.utterances[i], synth.corpus.utterances[i]);
  EXPECT_EQ(back.speaker_gender, synth.corpus.speaker_gender);
  fs::remove(dir_ / recs[0].feature_path);
  EXPECT_THROW(LoadCorpus((dir_ / "manifest.tsv").string()), MissingInputError);
  EXPECT_THROW(LoadCorpus((dir_ / "nope.tsv").string()), MissingInputError);
}

TEST(SyntheticTest, StructureAndDeterminism) {
  SynthConfig cfg;
  cfg.n_speakers = 4;
  cfg.utterances_per_speaker = 3;
  cfg.seed = 9;
  SyntheticCorpus a = GenerateSyntheticCorpus(cfg), b = GenerateSyntheticCorpus(cfg);
  ASSERT_EQ(a.corpus.utterances.size(), 12u);
  for (size_t i = 0; i < a.corpus.utterances.size(); ++i) {
    const auto &u = a.corpus.utterances[i];
    ASSERT_TRUE(u.phone_labels.has_value());
    EXPECT_EQ(u.phone_labels->size(), u.num_frames());
    EXPECT_EQ(u.dim(), 80u);
    for (int32_t l : *u.phone_labels) EXPECT_TRUE(l >= 0 && l < 10);
    EXPECT_EQ(u, b.corpus.utterances[i]);
  }
  std::set<Gender> genders;
  for (const auto &[spk, g] : a.corpus.speaker_gender) genders.insert(g);
  EXPECT_EQ(genders.size(), 2u);
}

TEST(SyntheticTest, NoiselessUnsmoothedFramesEqualTemplatePlusOffset) {
  SynthConfig cfg;
  cfg.n_speakers = 3;
  cfg.utterances_per_speaker = 2;
  cfg.noise_sigma = 0.0;
  cfg.smoothing = 0.0;
  SyntheticCorpus s = GenerateSyntheticCorpus(cfg);
  for (const auto &u : s.corpus.utterances) {
    const size_t spk = std::stoul(u.speaker_id.substr(3));
    for (size_t t = 0; t < u.num_frames(); ++t)
      for (size_t d = 0; d < u.dim(); ++d)
        ASSERT_EQ(u.frames(t, d), static_cast<float>(s.templates((*u.phone_labels)[t], d) +
                                                     s.speaker_offsets(spk, d)));
  }
  EXPECT_EQ(OracleFrameAccuracy(s), 1.0);
}

TEST(SyntheticTest, OracleAccuracyWithDefaults) {
  SyntheticCorpus s = GenerateSyntheticCorpus(SynthConfig{});
  EXPECT_GT(OracleFrameAccuracy(s), 0.8);
}

TEST(SyntheticTest, SegmentsHaveReasonableDwell) {
  SyntheticCorpus s = GenerateSyntheticCorpus(SynthConfig{});
  size_t segments = 0, frames = 0;
  for (const auto &u : s.corpus.utterances) {
    frames += u.num_frames();
    segments += 1;
    for (size_t t = 1; t < u.num_frames(); ++t)
      if ((*u.phone_labels)[t] != (*u.phone_labels)[t - 1]) ++segments;
  }
  const double mean_dwell = static_cast<double>(frames) / segments;
  EXPECT_GT(mean_dwell, 6.0);
  EXPECT_LT(mean_dwell, 10.0);
}

TEST(SyntheticTest, MarginalStatisticsStableAcrossSeeds) {
  std::vector<double> means;
  for (uint64_t seed : {1, 2, 3, 4}) {
    SynthConfig cfg;
    cfg.seed = seed;
    SyntheticCorpus s = GenerateSyntheticCorpus(cfg);
    double sum = 0;
    size_t n = 0;
    for (const auto &u : s.corpus.utterances)
      for (float v : u.frames.values()) sum += v, ++n;
    means.push_back(sum / n);
  }
  for (double m : means) EXPECT_NEAR(m, means[0], 0.1);
}

TEST(SyntheticTest, InvalidConfigRejected) {
  SynthConfig c;
  c.smoothing = 1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = SynthConfig{};
  c.n_phones = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

std::vector<FeatureSequence> VariedCorpus(size_t count, uint64_t seed) {
  std::vector<FeatureSequence> out;
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < count; ++i) {
    FeatureSequence s = RandomSequence(5 + rng() % 20, 3, true, seed * 1000 + i);
    s.utterance_id = "u" + std::to_string(i);
    out.push_back(s);
  }
  return out;
}

TEST(BatchingTest, ThirtyThreeUtterancesMakeTwoBatches) {
  auto corpus = VariedCorpus(33, 1);
  auto batches = MakeBatches(corpus, BatchOptions{}, 4, 0);
  ASSERT_EQ(batches.size(), 2u);
  std::multiset<size_t> sizes{batches[0].size, batches[1].size};
  EXPECT_EQ(sizes, (std::multiset<size_t>{1, 32}));
}

TEST(BatchingTest, EveryUtteranceOncePerEpochAndPaddingIsZero) {
  auto corpus = VariedCorpus(50, 2);
  BatchOptions opts;
  opts.batch_size = 8;
  for (uint64_t epoch = 0; epoch < 3; ++epoch) {
    std::multiset<size_t> seen;
    for (const Batch &b : MakeBatches(corpus, opts, 7, epoch)) {
      for (size_t j = 0; j < b.size; ++j) {
        seen.insert(b.corpus_indices[j]);
        const auto &src = corpus[b.corpus_indices[j]];
        EXPECT_EQ(b.lengths[j], src.num_frames());
        for (size_t t = 0; t < b.max_len; ++t)
          for (size_t d = 0; d < b.dim; ++d) {
            const float expect = t < src.num_frames() ? src.frames(t, d) : 0.0f;
            ASSERT_EQ(b.Frame(j, t)[d], expect);
          }
      }
    }
    std::multiset<size_t> all;
    for (size_t i = 0; i < corpus.size(); ++i) all.insert(i);
    EXPECT_EQ(seen, all);
  }
}

TEST(BatchingTest, SameSeedSameComposition) {
  auto corpus = VariedCorpus(40, 3);
  BatchOptions opts;
  opts.batch_size = 6;
  auto a = MakeBatches(corpus, opts, 11, 2), b = MakeBatches(corpus, opts, 11, 2);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].corpus_indices, b[i].corpus_indices);
    EXPECT_EQ(a[i].frames, b[i].frames);
  }
  auto c = MakeBatches(corpus, opts, 11, 3);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) differs |= a[i].corpus_indices != c[i].corpus_indices;
  EXPECT_TRUE(differs);
}

TEST(BatchingTest, ChunkedShapeAndRejection) {
  auto corpus = VariedCorpus(20, 4);
  for (auto &s : corpus) s = RandomSequence(40 + s.num_frames(), 3, true, s.num_frames());
  BatchOptions opts;
  opts.batch_size = 8;
  opts.mode = BatchMode::kChunked;
  opts.chunk_length = 32;
  for (const Batch &b : MakeBatches(corpus, opts, 5, 0)) {
    EXPECT_EQ(b.max_len, 32u);
    EXPECT_EQ(b.frames.rows(), b.size * 32);
    for (size_t j = 0; j < b.size; ++j) {
      EXPECT_EQ(b.lengths[j], 32u);
      const auto &src = corpus[b.corpus_indices[j]];
      ASSERT_LE(b.chunk_starts[j] + 32, src.num_frames());
      EXPECT_EQ(b.Frame(j, 5)[1], src.frames(b.chunk_starts[j] + 5, 1));
      EXPECT_EQ(b.labels[j].size(), 32u);
    }
  }
  corpus[3] = RandomSequence(10, 3, false, 99);
  corpus[3].utterance_id = "short_one";
  try {
    MakeBatches(corpus, opts, 5, 0);
    FAIL();
  } catch (const ContractError &e) {
    EXPECT_NE(std::string(e.what()).find("short_one"), std::string::npos);
  }
  opts.pad_short_chunks = true;
  EXPECT_NO_THROW(MakeBatches(corpus, opts, 5, 0));
  opts.batch_size = 0;
  EXPECT_THROW(MakeBatches(corpus, opts, 5, 0), ConfigError);
}

}  // namespace
}  // namespace predcode
