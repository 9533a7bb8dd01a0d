// src/wav.cc

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

#include "predcode/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "predcode/binary_io.h"
#include "predcode/errors.h"

namespace predcode {

namespace {

uint16_t ReadU16(ByteReader *r, const char *what) {
  const std::string b = r->ReadBytes(2, what);
  return static_cast<uint16_t>(static_cast<uint8_t>(b[0]) | (static_cast<uint8_t>(b[1]) << 8));
}

void AppendU16(uint16_t v, std::string *out) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>(v >> 8));
}

}  // namespace

Waveform ParseWav(const std::string &bytes, const std::string &source) {
  ByteReader r(bytes, source);
  if (r.ReadBytes(4, "RIFF tag") != "RIFF") r.Fail("not a RIFF file");
  r.ReadU32("RIFF size");
  if (r.ReadBytes(4, "WAVE tag") != "WAVE") r.Fail("not a WAVE file");
  int channels = 0, rate = 0, bits = 0;
  bool have_format = false;
  while (!r.AtEnd()) {
    const std::string id = r.ReadBytes(4, "chunk id");
    const uint32_t size = r.ReadU32("chunk size");
    if (id == "fmt ") {
      if (size < 16) r.Fail("fmt chunk shorter than 16 bytes");
      const uint16_t format = ReadU16(&r, "audio format");
      channels = ReadU16(&r, "channel count");
      rate = static_cast<int>(r.ReadU32("sample rate"));
      r.ReadU32("byte rate");
      ReadU16(&r, "block align");
      bits = ReadU16(&r, "bits per sample");
      r.ReadBytes(size - 16, "fmt extension");
      if (format != 1) r.Fail("audio format " + std::to_string(format) + " is not integer PCM");
      if (bits != 16) r.Fail(std::to_string(bits) + "-bit samples are not supported");
      if (channels < 1) r.Fail("zero channels");
      if (rate <= 0) r.Fail("non-positive sample rate");
      have_format = true;
    } else if (id == "data") {
      if (!have_format) r.Fail("data chunk before fmt chunk");
      const size_t frame_bytes = 2 * static_cast<size_t>(channels);
      if (size % frame_bytes != 0) r.Fail("data chunk is not a whole number of frames");
      const std::string data = r.ReadBytes(size, "sample data");
      Waveform wave;
      wave.sample_rate = rate;
      const size_t frames = size / frame_bytes;
      wave.samples.resize(frames);
      for (size_t i = 0; i < frames; ++i) {
        double sum = 0;
        for (int c = 0; c < channels; ++c) {
          const size_t at = i * frame_bytes + 2 * static_cast<size_t>(c);
          const auto v = static_cast<int16_t>(static_cast<uint8_t>(data[at]) |
                                              (static_cast<uint8_t>(data[at + 1]) << 8));
          sum += v / 32768.0;
        }
        wave.samples[i] = sum / channels;
      }
      return wave;
    } else {
      r.ReadBytes(size + (size & 1), "chunk body");
    }
  }
  r.Fail("no data chunk");
}

Waveform ReadWav(const std::string &path) { return ParseWav(ReadFileBytes(path), path); }

std::string EncodeWav(const Waveform &wave) {
  const uint32_t data_bytes = static_cast<uint32_t>(2 * wave.samples.size());
  std::string out = "RIFF";
  AppendU32(36 + data_bytes, &out);
  out += "WAVEfmt ";
  AppendU32(16, &out);
  AppendU16(1, &out);
  AppendU16(1, &out);
  AppendU32(static_cast<uint32_t>(wave.sample_rate), &out);
  AppendU32(static_cast<uint32_t>(wave.sample_rate) * 2, &out);
  AppendU16(2, &out);
  AppendU16(16, &out);
  out += "data";
  AppendU32(data_bytes, &out);
  for (double s : wave.samples) {
    const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    AppendU16(static_cast<uint16_t>(static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0))),
              &out);
  }
  return out;
}

}  // namespace predcode
