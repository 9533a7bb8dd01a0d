// src/cli.cc

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

#include "predcode/cli.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <map>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "predcode/apc.h"
#include "predcode/binary_io.h"
#include "predcode/checkpoint.h"
#include "predcode/corpus.h"
#include "predcode/cpc.h"
#include "predcode/frontend.h"
#include "predcode/key_value.h"
#include "predcode/pipeline.h"
#include "predcode/probes.h"
#include "predcode/speaker.h"
#include "predcode/synthetic.h"
#include "predcode/wav.h"

#ifndef PREDCODE_VERSION
#define PREDCODE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace predcode {

int ExitCodeFor(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return kExitUsage;
    case ErrorCategory::kMissingInput: return kExitMissingInput;
    case ErrorCategory::kDimension: return kExitDimension;
    case ErrorCategory::kParse: return kExitParse;
    case ErrorCategory::kNumerical: return kExitNumerical;
    default: return kExitOther;
  }
}

namespace {

using Entries = std::vector<std::pair<std::string, std::string>>;

// Resolved settings of one command: declared defaults, then the config file,
// then --set overrides, then dedicated flags.  Undeclared keys are rejected.
class Settings {
 public:
  explicit Settings(const Entries &defaults) {
    for (const auto &[k, v] : defaults) {
      order_.push_back(k);
      values_[k] = v;
    }
  }

  void Merge(const KeyValues &kv, const std::string &source) {
    for (const auto &[k, v] : kv) Set(k, v, source);
  }

  void Set(const std::string &key, const std::string &value, const std::string &source) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown key '" + key + "' in " + source);
    it->second = value;
  }

  const std::string &Text(const std::string &key) const { return values_.at(key); }

  uint64_t U64(const std::string &key) const {
    const std::string &s = Text(key);
    uint64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
      throw ConfigError("key '" + key + "' expects a non-negative integer, got '" + s + "'");
    return v;
  }

  size_t Count(const std::string &key) const { return static_cast<size_t>(U64(key)); }

  double Real(const std::string &key) const {
    const std::string &s = Text(key);
    double v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty() || !std::isfinite(v))
      throw ConfigError("key '" + key + "' expects a finite number, got '" + s + "'");
    return v;
  }

  bool Flag(const std::string &key) const {
    const std::string &s = Text(key);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("key '" + key + "' expects true or false, got '" + s + "'");
  }

  std::vector<std::string> List(const std::string &key) const {
    std::vector<std::string> out;
    std::stringstream ss(Text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (item.empty()) throw ConfigError("key '" + key + "' has an empty list element");
      out.push_back(item);
    }
    if (out.empty()) throw ConfigError("key '" + key + "' needs at least one value");
    return out;
  }

  std::vector<size_t> CountList(const std::string &key) const {
    std::vector<size_t> out;
    for (const std::string &item : List(key)) {
      Settings one(Entries{{key, item}});
      out.push_back(one.Count(key));
    }
    return out;
  }

  Entries entries() const {
    Entries out;
    for (const auto &k : order_) out.emplace_back(k, values_.at(k));
    return out;
  }
  const KeyValues &values() const { return values_; }

 private:
  std::vector<std::string> order_;
  KeyValues values_;
};

// Flags shared by every command.
struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
};

void AddCommonFlags(CLI::App *sub, CommonFlags *flags) {
  sub->add_option("--config", flags->config, "settings file of 'key = value' lines");
  sub->add_option("--set", flags->sets, "override one setting, as key=value (repeatable)")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sub->add_option("--out", flags->out, "output directory")->required();
}

void ApplyFlags(const CommonFlags &flags, Settings *settings) {
  if (!flags.config.empty()) settings->Merge(ReadKeyValueFile(flags.config), flags.config);
  for (const std::string &s : flags.sets) {
    const size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got '" + s + "'");
    settings->Set(s.substr(0, eq), s.substr(eq + 1), "--set");
  }
}

// Relative output directories are placed under the output root when the
// environment names one.
fs::path ResolveOut(const std::string &out) {
  fs::path p(out);
  const char *root = std::getenv(kOutRootVariable);
  if (p.is_relative() && root != nullptr && *root != '\0') p = fs::path(root) / p;
  return p;
}

void RequireDistinct(const fs::path &out, const std::string &input_file) {
  std::error_code ec;
  const fs::path in_dir = fs::absolute(fs::path(input_file)).parent_path();
  if (fs::weakly_canonical(fs::absolute(out), ec) == fs::weakly_canonical(in_dir, ec))
    throw ConfigError("output directory '" + out.string() +
                      "' holds the input; outputs are never written in place");
}

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// config.conf replays the run; run.conf records provenance; run.log holds
// the only time-dependent content.
struct RunRecord {
  std::string command;
  const Settings *settings = nullptr;
  Entries inputs;
  std::vector<std::string> argv;

  std::string Hash() const {
    KeyValues kv = settings->values();
    kv["command"] = command;
    return ConfigHash(kv);
  }
  uint64_t Seed() const { return settings->values().count("seed") ? settings->U64("seed") : 0; }

  void Write(const fs::path &dir) const {
    AtomicWriteFile((dir / "config.conf").string(), FormatKeyValues(settings->entries()));
    Entries run{{"command", command},
                {"config_hash", Hash()},
                {"seed", std::to_string(Seed())},
                {"predcode_version", PREDCODE_VERSION},
                {"feature_format", "FEAT1"},
                {"checkpoint_format", "APCCKPT1"}};
    for (const auto &[k, v] : inputs) run.emplace_back("input." + k, v);
    AtomicWriteFile((dir / "run.conf").string(), FormatKeyValues(run));
    std::string log = "time = " + UtcTimestamp() + "\nargs =";
    for (const auto &a : argv) log += " " + a;
    AtomicWriteFile((dir / "run.log").string(), log + "\n");
  }
};

void CheckUniformDim(const Corpus &corpus, const std::string &source) {
  if (corpus.utterances.empty())
    throw EmptyInputError("manifest '" + source + "' lists no utterances");
  const size_t dim = corpus.utterances.front().dim();
  for (const auto &u : corpus.utterances)
    if (u.dim() != dim)
      throw DimensionError("utterance '" + u.utterance_id + "' has dimension " +
                           std::to_string(u.dim()) + " but '" +
                           corpus.utterances.front().utterance_id + "' has " + std::to_string(dim));
}

Corpus LoadChecked(const std::string &manifest) {
  Corpus corpus = LoadCorpus(manifest);
  CheckUniformDim(corpus, manifest);
  return corpus;
}

void WriteCorpus(const Corpus &corpus, const fs::path &dir, bool label_files) {
  auto records = SaveCorpus(corpus, dir.string(), label_files);
  AtomicWriteFile((dir / "manifest.tsv").string(), FormatManifest(records));
}

NormScope ParseNormalize(const std::string &s, bool *enabled) {
  *enabled = s != "none";
  if (!*enabled) return NormScope::kGlobal;
  return ParseNormScope(s);
}

// ----- model settings -----

const Entries kApcKeys = {{"hidden", "64"},           {"layers", "1"},  {"residual", "true"},
                          {"n_steps", "2"},           {"epochs", "20"}, {"batch_size", "32"},
                          {"learning_rate", "0.003"}, {"seed", "0"}};

const Entries kCpcKeys = {
    {"encoder_width", "64"},       {"context_width", "64"},     {"n_steps", "2"},
    {"variant", "n9same"},         {"negatives", "9"},          {"epochs", "20"},
    {"batch_size", "32"},          {"exhaust_batch_size", "8"}, {"chunk_length", "128"},
    {"pad_short_chunks", "false"}, {"learning_rate", "0.003"},  {"seed", "0"}};

const Entries kProbeKeys = {
    {"epochs", "50"},  {"batch_size", "256"}, {"learning_rate", "0.001"}, {"hidden_width", "512"},
    {"patience", "5"}, {"seed", "0"},         {"split_seed", "1"}};

ApcConfig ApcModelSettings(const Settings &s, size_t input_dim, const std::string &layers_key) {
  ApcConfig c;
  c.input_dim = input_dim;
  c.hidden = s.Count("hidden");
  c.layers = s.Count(layers_key);
  c.residual = s.Flag("residual");
  c.Validate();
  return c;
}

ApcTrainConfig ApcTrainSettings(const Settings &s) {
  ApcTrainConfig t;
  t.epochs = s.Count("epochs");
  t.batch_size = s.Count("batch_size");
  t.learning_rate = s.Real("learning_rate");
  t.seed = s.U64("seed");
  if (t.batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (t.epochs == 0) throw ConfigError("epochs must be at least 1");
  return t;
}

CpcConfig CpcModelSettings(const Settings &s, size_t input_dim) {
  CpcConfig c;
  c.input_dim = input_dim;
  c.encoder_width = s.Count("encoder_width");
  c.context_width = s.Count("context_width");
  c.variant = ParseVariant(s.Text("variant"));
  c.negatives = s.Count("negatives");
  c.n_steps = s.Count("n_steps");
  c.Validate();
  return c;
}

CpcTrainConfig CpcTrainSettings(const Settings &s) {
  CpcTrainConfig t;
  t.epochs = s.Count("epochs");
  t.batch_size = s.Count("batch_size");
  t.exhaust_batch_size = s.Count("exhaust_batch_size");
  t.chunk_length = s.Count("chunk_length");
  t.pad_short_chunks = s.Flag("pad_short_chunks");
  t.learning_rate = s.Real("learning_rate");
  t.seed = s.U64("seed");
  if (t.batch_size == 0 || t.exhaust_batch_size == 0)
    throw ConfigError("batch sizes must be at least 1");
  if (t.epochs == 0) throw ConfigError("epochs must be at least 1");
  return t;
}

ProbeTrainConfig ProbeSettings(const Settings &s, const std::string &prefix) {
  ProbeTrainConfig p;
  p.epochs = s.Count(prefix + "epochs");
  p.batch_size = s.Count(prefix + "batch_size");
  p.learning_rate = s.Real(prefix + "learning_rate");
  p.hidden_width = s.Count(prefix + "hidden_width");
  p.patience = s.Count(prefix + "patience");
  p.seed = s.U64(prefix + "seed");
  if (p.epochs == 0 || p.batch_size == 0)
    throw ConfigError("probe epochs and batch size must be positive");
  return p;
}

EpochCallback Progress(std::ostream &err, const std::string &what) {
  return [&err, what](size_t epoch, double loss) {
    err << what << " epoch " << epoch + 1 << " loss " << loss << "\n";
  };
}

// A trained extractor as stored by the train command.
struct LoadedModel {
  std::string kind;
  KeyValues meta;
  std::unique_ptr<ApcModel<float>> apc;
  std::unique_ptr<CpcModel<float>> cpc;
  size_t input_dim() const { return apc ? apc->config().input_dim : cpc->config().input_dim; }
};

LoadedModel LoadModel(const std::string &dir) {
  LoadedModel m;
  const fs::path base(dir);
  m.meta = ReadKeyValueFile((base / "model.conf").string());
  auto kind = m.meta.find("kind");
  if (kind == m.meta.end()) throw ParseError("model.conf in '" + dir + "' has no kind");
  m.kind = kind->second;
  const std::string ckpt = (base / "model.ckpt").string();
  if (m.kind == "apc") {
    m.apc = std::make_unique<ApcModel<float>>(ApcConfig::FromKeyValues(m.meta), 0);
    LoadCheckpointInto(ckpt, &m.apc->params());
  } else if (m.kind == "cpc") {
    m.cpc = std::make_unique<CpcModel<float>>(CpcConfig::FromKeyValues(m.meta), 0);
    LoadCheckpointInto(ckpt, &m.cpc->params());
  } else {
    throw ParseError("model.conf in '" + dir + "' has unknown kind '" + m.kind + "'");
  }
  return m;
}

std::string ToText(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

// ----- commands -----

struct Invocation {
  std::vector<std::string> argv;
  std::ostream *out;
  std::ostream *err;
};

int GenSynth(const CommonFlags &flags, const Invocation &inv) {
  Settings s(Entries{{"n_speakers", "20"},
                     {"n_phones", "10"},
                     {"utterances_per_speaker", "20"},
                     {"frames_per_utterance", "100"},
                     {"feature_dim", "80"},
                     {"phone_dwell", "8"},
                     {"speaker_offset_scale", "1"},
                     {"noise_sigma", "0.3"},
                     {"smoothing", "0.7"},
                     {"seed", "0"},
                     {"normalize", "global"},
                     {"max_nontarget_per_speaker", "200"}});
  ApplyFlags(flags, &s);
  SynthConfig sc;
  sc.n_speakers = s.Count("n_speakers");
  sc.n_phones = s.Count("n_phones");
  sc.utterances_per_speaker = s.Count("utterances_per_speaker");
  sc.frames_per_utterance = s.Count("frames_per_utterance");
  sc.feature_dim = s.Count("feature_dim");
  sc.phone_dwell = s.Real("phone_dwell");
  sc.speaker_offset_scale = s.Real("speaker_offset_scale");
  sc.noise_sigma = s.Real("noise_sigma");
  sc.smoothing = s.Real("smoothing");
  sc.seed = s.U64("seed");
  sc.Validate();
  bool normalize = false;
  const NormScope scope = ParseNormalize(s.Text("normalize"), &normalize);

  SyntheticCorpus synth = GenerateSyntheticCorpus(sc);
  if (normalize) SpeakerNormalize(&synth.corpus.utterances, scope);
  SpeakerTrialSetup trials =
      MakeSpeakerTrials(synth.corpus, sc.seed, s.Count("max_nontarget_per_speaker"));
  for (const auto &w : trials.trials.warnings) *inv.err << "warning: " << w << "\n";

  const fs::path out = ResolveOut(flags.out);
  fs::create_directories(out);
  WriteCorpus(synth.corpus, out, true);
  AtomicWriteFile((out / "trials.txt").string(), FormatTrials(trials.trials));
  RunRecord{"gen-synth", &s, {}, inv.argv}.Write(out);
  *inv.out << "wrote " << synth.corpus.utterances.size() << " utterances and "
           << trials.trials.trials.size() << " trials to " << out.string() << "\n";
  return kExitOk;
}

// Layout: <waves>/speakers.tsv ("speaker gender" lines) and
// <waves>/<speaker>/<utterance>.wav, with optional <utterance>.lab frame
// labels beside each wave.
int Featurize(const CommonFlags &flags, const std::string &waves, const Invocation &inv) {
  Settings s(Entries{{"window", "400"},
                     {"hop", "160"},
                     {"fft_size", "512"},
                     {"n_mels", "80"},
                     {"fmin", "0"},
                     {"fmax", "8000"},
                     {"log_floor", "1e-10"},
                     {"normalize", "speaker"}});
  ApplyFlags(flags, &s);
  MelConfig mel;
  mel.window = s.Count("window");
  mel.hop = s.Count("hop");
  mel.fft_size = s.Count("fft_size");
  mel.n_mels = s.Count("n_mels");
  mel.fmin = s.Real("fmin");
  mel.fmax = s.Real("fmax");
  mel.log_floor = s.Real("log_floor");
  bool normalize = false;
  const NormScope scope = ParseNormalize(s.Text("normalize"), &normalize);

  const fs::path root(waves);
  if (!fs::is_directory(root)) throw MissingInputError("wave directory '" + waves + "' not found");
  const std::string table_path = (root / "speakers.tsv").string();
  std::istringstream table(ReadFileBytes(table_path));
  Corpus corpus;
  std::string line;
  for (size_t lineno = 1; std::getline(table, line); ++lineno) {
    std::istringstream fields(line);
    std::string spk, gender, extra;
    if (!(fields >> spk)) continue;
    if (spk[0] == '#') continue;
    if (!(fields >> gender) || (fields >> extra))
      throw ParseError(table_path + ":" + std::to_string(lineno) + ": expected 'speaker gender'");
    if (!corpus.speaker_gender.emplace(spk, ParseGender(gender)).second)
      throw ParseError(table_path + ":" + std::to_string(lineno) + ": speaker '" + spk +
                       "' listed twice");
  }

  std::vector<fs::path> speaker_dirs;
  for (const auto &e : fs::directory_iterator(root))
    if (e.is_directory()) speaker_dirs.push_back(e.path());
  std::sort(speaker_dirs.begin(), speaker_dirs.end());
  for (const fs::path &dir : speaker_dirs) {
    const std::string spk = dir.filename().string();
    std::vector<fs::path> wavs;
    for (const auto &e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".wav") wavs.push_back(e.path());
    if (wavs.empty()) continue;
    if (!corpus.speaker_gender.count(spk))
      throw MissingInputError("speakers.tsv has no gender for speaker '" + spk + "'");
    std::sort(wavs.begin(), wavs.end());
    for (const fs::path &wav : wavs) {
      FeatureSequence seq = LogMel(ReadWav(wav.string()), mel, wav.stem().string(), spk);
      fs::path lab = wav;
      lab.replace_extension(".lab");
      if (fs::exists(lab)) {
        std::vector<int32_t> labels = LoadLabels(lab.string());
        if (labels.size() != seq.num_frames())
          throw DimensionError("'" + lab.string() + "' has " + std::to_string(labels.size()) +
                               " labels for " + std::to_string(seq.num_frames()) + " frames");
        seq.phone_labels = std::move(labels);
      }
      corpus.utterances.push_back(std::move(seq));
    }
  }
  if (corpus.utterances.empty()) throw EmptyInputError("no .wav files under '" + waves + "'");
  if (normalize) SpeakerNormalize(&corpus.utterances, scope);

  const fs::path out = ResolveOut(flags.out);
  fs::create_directories(out);
  WriteCorpus(corpus, out, false);
  RunRecord{"featurize", &s, {{"waves", waves}}, inv.argv}.Write(out);
  *inv.out << "wrote " << corpus.utterances.size() << " utterances to " << out.string() << "\n";
  return kExitOk;
}

int Train(const CommonFlags &flags, const std::string &kind, const std::string &manifest, bool plot,
          const Invocation &inv) {
  Settings s(kind == "apc" ? kApcKeys : kCpcKeys);
  ApplyFlags(flags, &s);
  const fs::path out = ResolveOut(flags.out);
  RequireDistinct(out, manifest);
  Corpus corpus = LoadChecked(manifest);
  const size_t dim = corpus.utterances.front().dim();

  KeyValues meta;
  std::string checkpoint;
  std::vector<double> losses;
  if (kind == "apc") {
    ApcConfig mc = ApcModelSettings(s, dim, "layers");
    ApcTrainConfig tc = ApcTrainSettings(s);
    tc.n_steps = s.Count("n_steps");
    auto r = TrainApc<float>(corpus.utterances, mc, tc, Progress(*inv.err, "apc"));
    meta = mc.ToKeyValues();
    meta["n_steps"] = std::to_string(tc.n_steps);
    checkpoint = EncodeCheckpoint(r.model.params());
    losses = r.loss_history;
    *inv.out << "final loss " << losses.back() << " copy-predictor loss "
             << CopyPredictorLoss(corpus.utterances, tc.n_steps) << "\n";
  } else {
    CpcConfig mc = CpcModelSettings(s, dim);
    CpcTrainConfig tc = CpcTrainSettings(s);
    auto r = TrainCpc<float>(corpus.utterances, mc, tc, Progress(*inv.err, "cpc"));
    meta = mc.ToKeyValues();
    checkpoint = EncodeCheckpoint(r.model.params());
    losses = r.loss_history;
    *inv.out << "final loss " << losses.back() << "\n";
  }
  meta["kind"] = kind;

  fs::create_directories(out);
  Entries meta_entries(meta.begin(), meta.end());
  AtomicWriteFile((out / "model.conf").string(), FormatKeyValues(meta_entries));
  AtomicWriteFile((out / "loss.txt").string(), FormatLossHistory(losses));
  if (plot)
    AtomicWriteFile((out / "loss.svg").string(), LossCurveSvg(losses, kind + " training loss"));
  RunRecord{"train-" + kind, &s, {{"manifest", manifest}}, inv.argv}.Write(out);
  // The checkpoint goes last so its presence marks a complete run.
  AtomicWriteFile((out / "model.ckpt").string(), checkpoint);
  return kExitOk;
}

std::vector<FeatureSequence> ExtractWith(const LoadedModel &m, const Corpus &corpus, size_t layer,
                                         const std::string &tap) {
  if (corpus.utterances.front().dim() != m.input_dim())
    throw DimensionError("features have dimension " +
                         std::to_string(corpus.utterances.front().dim()) +
                         " but the model expects " + std::to_string(m.input_dim()));
  if (m.apc) {
    const size_t layers = m.apc->config().layers;
    const size_t chosen = layer == 0 ? layers : layer;
    if (chosen > layers)
      throw ConfigError("layer " + std::to_string(layer) + " requested from a " +
                        std::to_string(layers) + "-layer model");
    return ExtractApcFeatures(*m.apc, corpus.utterances, chosen);
  }
  const FeatureTap t = tap == "default" ? TapFor(m.cpc->config().variant) : ParseTap(tap);
  return ExtractCpcFeatures(*m.cpc, corpus.utterances, t);
}

int Extract(const CommonFlags &flags, const std::string &model_dir, const std::string &manifest,
            const Invocation &inv) {
  Settings s(Entries{{"layer", "0"}, {"tap", "default"}});
  ApplyFlags(flags, &s);
  const fs::path out = ResolveOut(flags.out);
  RequireDistinct(out, manifest);
  LoadedModel model = LoadModel(model_dir);
  Corpus corpus = LoadChecked(manifest);
  Corpus reps{ExtractWith(model, corpus, s.Count("layer"), s.Text("tap")), corpus.speaker_gender};
  fs::create_directories(out);
  WriteCorpus(reps, out, false);
  RunRecord{"extract", &s, {{"model", model_dir}, {"manifest", manifest}}, inv.argv}.Write(out);
  *inv.out << "wrote " << reps.utterances.size() << " utterances of dimension "
           << reps.utterances.front().dim() << " to " << out.string() << "\n";
  return kExitOk;
}

ReportRecord PhoneRecord(const PhoneProbeResult &r) {
  return {"per",
          r.test_error_rate,
          {{"kind", ProbeKindName(r.kind)},
           {"classes", std::to_string(r.num_classes)},
           {"train_frames", std::to_string(r.train_frames)},
           {"dev_frames", std::to_string(r.dev_frames)},
           {"test_frames", std::to_string(r.test_frames)},
           {"train_accuracy", ToText(r.train_accuracy)},
           {"dev_accuracy", ToText(r.dev_accuracy)},
           {"epochs", std::to_string(r.epochs_run)}}};
}

ReportRecord SpeakerRecord(const SpeakerVerificationResult &r) {
  return {"eer",
          r.eer.eer,
          {{"threshold", ToText(r.eer.threshold)},
           {"targets", std::to_string(r.eer.num_target)},
           {"nontargets", std::to_string(r.eer.num_nontarget)},
           {"lda_dim", std::to_string(r.lda_dim)},
           {"lda_speakers", std::to_string(r.lda_speakers)},
           {"degenerate_scores", std::to_string(r.degenerate_scores)}}};
}

void WriteReport(const fs::path &out, const std::vector<ReportRecord> &records,
                 const RunRecord &run, std::ostream &stream) {
  const std::string text = FormatReport(records, run.Hash(), run.Seed());
  AtomicWriteFile((out / "report.txt").string(), text);
  run.Write(out);
  stream << text;
}

int ProbePhone(const CommonFlags &flags, const std::string &manifest, const std::string &kind,
               const Invocation &inv) {
  Entries keys = kProbeKeys;
  keys.insert(keys.begin(), {"kind", "linear"});
  Settings s(keys);
  ApplyFlags(flags, &s);
  if (!kind.empty()) s.Set("kind", kind, "--kind");
  const ProbeKind probe_kind = ParseProbeKind(s.Text("kind"));
  const ProbeTrainConfig pc = ProbeSettings(s, "");
  const fs::path out = ResolveOut(flags.out);
  RequireDistinct(out, manifest);
  Corpus corpus = LoadChecked(manifest);
  PhoneProbeResult r = RunPhoneProbe(corpus.utterances, probe_kind, pc, s.U64("split_seed"));
  fs::create_directories(out);
  WriteReport(out, {PhoneRecord(r)},
              RunRecord{"probe-phone", &s, {{"manifest", manifest}}, inv.argv}, *inv.out);
  return kExitOk;
}

int ProbeSpeaker(const CommonFlags &flags, const std::string &manifest, const std::string &trials,
                 const Invocation &inv) {
  Settings s(Entries{{"max_lda_dim", "24"}});
  ApplyFlags(flags, &s);
  const fs::path out = ResolveOut(flags.out);
  RequireDistinct(out, manifest);
  Corpus corpus = LoadChecked(manifest);
  TrialList list = ParseTrials(ReadFileBytes(trials), trials);
  SpeakerVerificationResult r =
      RunSpeakerVerification(corpus.utterances, list, s.Count("max_lda_dim"));
  fs::create_directories(out);
  AtomicWriteFile((out / "scores.txt").string(), FormatScores(r.scores));
  WriteReport(
      out, {SpeakerRecord(r)},
      RunRecord{"probe-speaker", &s, {{"manifest", manifest}, {"trials", trials}}, inv.argv},
      *inv.out);
  return kExitOk;
}

// Grid over (variant, n_steps, layer).  APC trains one model of depth
// max(layers) per n and reads every listed layer; CPC trains one model per
// (variant, n) and reads every listed tap.
int Sweep(const CommonFlags &flags, const std::string &manifest, const std::string &trials,
          const Invocation &inv) {
  Entries keys = {{"model", "apc"},         {"variants", "n9same"}, {"n_steps", "1,2,3,5"},
                  {"layers", "1,2,3"},      {"taps", "default"},    {"metrics", "per"},
                  {"probe_kind", "linear"}, {"max_lda_dim", "24"}};
  for (const auto &[k, v] : kApcKeys)
    if (k != "layers" && k != "n_steps") keys.emplace_back(k, v);
  for (const auto &[k, v] : kCpcKeys) {
    const bool shared =
        std::any_of(keys.begin(), keys.end(), [&](const auto &e) { return e.first == k; });
    if (!shared && k != "variant") keys.emplace_back(k, v);
  }
  for (const auto &[k, v] : kProbeKeys) keys.emplace_back(k == "split_seed" ? k : "probe_" + k, v);
  Settings s(keys);
  ApplyFlags(flags, &s);

  const std::string model = s.Text("model");
  if (model != "apc" && model != "cpc")
    throw ConfigError("model must be apc or cpc, got '" + model + "'");
  const std::vector<size_t> steps = s.CountList("n_steps");
  const std::vector<std::string> metrics = s.List("metrics");
  for (const auto &m : metrics)
    if (m != "per" && m != "eer")
      throw ConfigError("unknown metric '" + m + "' (expected per or eer)");
  const bool want_eer = std::find(metrics.begin(), metrics.end(), "eer") != metrics.end();
  if (want_eer && trials.empty()) throw ConfigError("metric eer needs --trials");
  const ProbeKind probe_kind = ParseProbeKind(s.Text("probe_kind"));
  const ProbeTrainConfig pc = ProbeSettings(s, "probe_");

  const fs::path out = ResolveOut(flags.out);
  RequireDistinct(out, manifest);
  Corpus corpus = LoadChecked(manifest);
  TrialList list;
  if (want_eer) list = ParseTrials(ReadFileBytes(trials), trials);
  const size_t dim = corpus.utterances.front().dim();

  std::vector<ReportRecord> records;
  auto evaluate = [&](const std::vector<FeatureSequence> &feats, const Entries &where) {
    for (const auto &m : metrics) {
      ReportRecord r =
          m == "per" ? PhoneRecord(RunPhoneProbe(feats, probe_kind, pc, s.U64("split_seed")))
                     : SpeakerRecord(RunSpeakerVerification(feats, list, s.Count("max_lda_dim")));
      r.extras.insert(r.extras.begin(), where.begin(), where.end());
      *inv.err << "sweep";
      for (const auto &[k, v] : where) *inv.err << " " << k << "=" << v;
      *inv.err << " " << r.metric << "=" << r.value << "\n";
      records.push_back(std::move(r));
    }
  };

  if (model == "apc") {
    const std::vector<size_t> layers = s.CountList("layers");
    Settings depth(
        Entries{{"layers", std::to_string(*std::max_element(layers.begin(), layers.end()))},
                {"hidden", s.Text("hidden")},
                {"residual", s.Text("residual")}});
    const ApcConfig mc = ApcModelSettings(depth, dim, "layers");
    for (size_t n : steps) {
      ApcTrainConfig tc = ApcTrainSettings(s);
      tc.n_steps = n;
      auto r = TrainApc<float>(corpus.utterances, mc, tc);
      for (size_t layer : layers) {
        if (layer == 0) throw ConfigError("layers are numbered from 1");
        evaluate(
            ExtractApcFeatures(r.model, corpus.utterances, layer),
            {{"variant", "apc"}, {"n_steps", std::to_string(n)}, {"layer", std::to_string(layer)}});
      }
    }
  } else {
    for (const std::string &variant : s.List("variants")) {
      for (size_t n : steps) {
        Settings one(Entries{{"encoder_width", s.Text("encoder_width")},
                             {"context_width", s.Text("context_width")},
                             {"variant", variant},
                             {"negatives", s.Text("negatives")},
                             {"n_steps", std::to_string(n)}});
        const CpcConfig mc = CpcModelSettings(one, dim);
        auto r = TrainCpc<float>(corpus.utterances, mc, CpcTrainSettings(s));
        for (const std::string &tap : s.List("taps")) {
          const FeatureTap t = tap == "default" ? TapFor(mc.variant) : ParseTap(tap);
          evaluate(ExtractCpcFeatures(r.model, corpus.utterances, t),
                   {{"variant", variant}, {"n_steps", std::to_string(n)}, {"layer", TapName(t)}});
        }
      }
    }
  }
  Entries inputs{{"manifest", manifest}};
  if (want_eer) inputs.emplace_back("trials", trials);
  fs::create_directories(out);
  WriteReport(out, records, RunRecord{"sweep", &s, inputs, inv.argv}, *inv.out);
  return kExitOk;
}

std::string OneLine(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int RunCommandLine(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{
      "Predictive coding speech representations: data generation, training, "
      "extraction and probing.",
      "predcode"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PREDCODE_VERSION);

  CommonFlags gen_flags, feat_flags, train_flags, extract_flags, phone_flags, spk_flags,
      sweep_flags;
  std::string waves, kind, manifest, model_dir, probe_kind, trials;
  bool plot = false;

  CLI::App *gen =
      app.add_subcommand("gen-synth", "generate a synthetic labeled corpus and trial list");
  AddCommonFlags(gen, &gen_flags);

  CLI::App *feat =
      app.add_subcommand("featurize", "compute log-Mel features from 16-bit PCM waves");
  AddCommonFlags(feat, &feat_flags);
  feat->add_option("--waves", waves, "directory of <speaker>/<utt>.wav plus speakers.tsv")
      ->required();

  CLI::App *train = app.add_subcommand("train", "train an APC or CPC extractor");
  AddCommonFlags(train, &train_flags);
  train->add_option("kind", kind, "apc or cpc")->required()->check(CLI::IsMember({"apc", "cpc"}));
  train->add_option("--manifest", manifest, "feature manifest")->required();
  train->add_flag("--plot", plot, "also write loss.svg");

  std::string layer, tap;
  CLI::App *extract = app.add_subcommand("extract", "run a trained extractor over a corpus");
  AddCommonFlags(extract, &extract_flags);
  extract->add_option("--model", model_dir, "output directory of a train run")->required();
  extract->add_option("--manifest", manifest, "feature manifest")->required();
  extract->add_option("--layer", layer, "APC layer, 1-based (default: last)");
  extract->add_option("--tap", tap, "CPC tap: frame or context (default: per variant)");

  CLI::App *phone =
      app.add_subcommand("probe-phone", "frame-level phone probe, reports error rate");
  AddCommonFlags(phone, &phone_flags);
  phone->add_option("--manifest", manifest, "labeled feature manifest")->required();
  phone->add_option("--kind", probe_kind, "linear, mlp1 or mlp3");

  CLI::App *spk = app.add_subcommand("probe-speaker", "speaker verification, reports EER");
  AddCommonFlags(spk, &spk_flags);
  spk->add_option("--manifest", manifest, "feature manifest")->required();
  spk->add_option("--trials", trials, "trial list")->required();

  CLI::App *sweep = app.add_subcommand("sweep", "grid over variant, prediction step and layer");
  AddCommonFlags(sweep, &sweep_flags);
  sweep->add_option("--manifest", manifest, "labeled feature manifest")->required();
  sweep->add_option("--trials", trials, "trial list, needed for the eer metric");

  std::vector<std::string> argv_store{"predcode"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char *> argv;
  for (auto &a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: category=usage message=" << OneLine(e.what()) << "\n";
    return kExitUsage;
  }

  const Invocation inv{args, &out, &err};
  try {
    if (gen->parsed()) return GenSynth(gen_flags, inv);
    if (feat->parsed()) return Featurize(feat_flags, waves, inv);
    if (train->parsed()) return Train(train_flags, kind, manifest, plot, inv);
    if (extract->parsed()) {
      if (!layer.empty()) extract_flags.sets.push_back("layer=" + layer);
      if (!tap.empty()) extract_flags.sets.push_back("tap=" + tap);
      return Extract(extract_flags, model_dir, manifest, inv);
    }
    if (phone->parsed()) return ProbePhone(phone_flags, manifest, probe_kind, inv);
    if (spk->parsed()) return ProbeSpeaker(spk_flags, manifest, trials, inv);
    if (sweep->parsed()) return Sweep(sweep_flags, manifest, trials, inv);
  } catch (const Error &e) {
    err << "error: category=" << CategoryName(e.category()) << " message=" << OneLine(e.what())
        << "\n";
    return ExitCodeFor(e.category());
  } catch (const std::exception &e) {
    err << "error: category=other message=" << OneLine(e.what()) << "\n";
    return kExitOther;
  }
  err << "error: category=usage message=no command given\n";
  return kExitUsage;
}

}  // namespace predcode
