// src/key_value.cc

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

#include "predcode/key_value.h"

#include <sstream>

#include "predcode/binary_io.h"
#include "predcode/errors.h"

namespace predcode {

namespace {

std::string Trim(const std::string &s) {
  const char *ws = " \t\r\n";
  size_t b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues ParseKeyValueText(const std::string &text, const std::string &source) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(source + ":" + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, value).second)
      throw ParseError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }
  return out;
}

KeyValues ReadKeyValueFile(const std::string &path) {
  return ParseKeyValueText(ReadFileBytes(path), path);
}

std::string FormatKeyValues(const std::vector<std::pair<std::string, std::string>> &entries) {
  std::string out;
  for (const auto &[k, v] : entries) out += k + " = " + v + "\n";
  return out;
}

}  // namespace predcode
