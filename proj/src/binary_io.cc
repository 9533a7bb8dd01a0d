// src/binary_io.cc

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

#include "predcode/binary_io.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "predcode/errors.h"

namespace predcode {

void AppendU64(uint64_t v, std::string *out) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void AppendU32(uint32_t v, std::string *out) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void AppendF32(float v, std::string *out) {
  uint32_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  AppendU32(bits, out);
}

void AppendLengthPrefixed(std::string_view s, std::string *out) {
  AppendU64(s.size(), out);
  out->append(s);
}

void ByteReader::Fail(const std::string &message) const {
  std::ostringstream os;
  os << source_ << ": " << message << " at byte offset " << offset_;
  throw ParseError(os.str());
}

void ByteReader::Require(size_t n, const char *what) const {
  if (remaining() < n) {
    std::ostringstream os;
    os << "truncated file while reading " << what << " (need " << n << " bytes, "
       << remaining() << " left)";
    Fail(os.str());
  }
}

uint64_t ByteReader::ReadU64(const char *what) {
  Require(8, what);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes_[offset_ + i])) << (8 * i);
  offset_ += 8;
  return v;
}

uint32_t ByteReader::ReadU32(const char *what) {
  Require(4, what);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes_[offset_ + i])) << (8 * i);
  offset_ += 4;
  return v;
}

float ByteReader::ReadF32(const char *what) {
  uint32_t bits = ReadU32(what);
  float v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

uint8_t ByteReader::ReadU8(const char *what) {
  Require(1, what);
  return static_cast<uint8_t>(bytes_[offset_++]);
}

std::string ByteReader::ReadBytes(size_t n, const char *what) {
  Require(n, what);
  std::string s(bytes_.substr(offset_, n));
  offset_ += n;
  return s;
}

std::string ByteReader::ReadLengthPrefixed(const char *what) {
  const size_t at = offset_;
  uint64_t n = ReadU64(what);
  if (n > remaining()) {
    offset_ = at;
    Fail(std::string("length prefix of ") + what + " exceeds file size");
  }
  return ReadBytes(n, what);
}

std::string ReadFileBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void AtomicWriteFile(const std::string &path, const std::string &contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw MissingInputError("cannot write '" + tmp + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw MissingInputError("short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw MissingInputError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

}  // namespace predcode
