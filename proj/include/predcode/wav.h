// predcode/wav.h

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

#ifndef PREDCODE_WAV_H_
#define PREDCODE_WAV_H_

#include <string>

#include "predcode/frontend.h"

namespace predcode {

// RIFF/WAVE with 16-bit integer PCM.  Multi-channel audio is averaged down
// to mono; samples are scaled to [-1, 1).  Anything else is a ParseError
// naming the source and the offending field.
Waveform ParseWav(const std::string &bytes, const std::string &source);
Waveform ReadWav(const std::string &path);

// Mono 16-bit PCM encoding with clipping to the representable range.
std::string EncodeWav(const Waveform &wave);

}  // namespace predcode

#endif  // PREDCODE_WAV_H_
