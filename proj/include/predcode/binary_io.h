// predcode/binary_io.h

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

#ifndef PREDCODE_BINARY_IO_H_
#define PREDCODE_BINARY_IO_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace predcode {

// Little-endian encoders appending to a byte string.
void AppendU64(uint64_t v, std::string *out);
void AppendU32(uint32_t v, std::string *out);
void AppendF32(float v, std::string *out);
void AppendLengthPrefixed(std::string_view s, std::string *out);

// Cursor over an in-memory file.  Every read past the end throws ParseError
// naming the byte offset and what was being read.
class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  uint64_t ReadU64(const char *what);
  uint32_t ReadU32(const char *what);
  float ReadF32(const char *what);
  uint8_t ReadU8(const char *what);
  std::string ReadBytes(size_t n, const char *what);
  std::string ReadLengthPrefixed(const char *what);

  size_t offset() const { return offset_; }
  bool AtEnd() const { return offset_ == bytes_.size(); }
  size_t remaining() const { return bytes_.size() - offset_; }
  [[noreturn]] void Fail(const std::string &message) const;

 private:
  void Require(size_t n, const char *what) const;

  std::string_view bytes_;
  std::string source_;
  size_t offset_ = 0;
};

std::string ReadFileBytes(const std::string &path);

// Writes to "<path>.tmp" and renames over path.
void AtomicWriteFile(const std::string &path, const std::string &contents);

}  // namespace predcode

#endif  // PREDCODE_BINARY_IO_H_
