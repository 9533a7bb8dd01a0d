// predcode/key_value.h

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

#ifndef PREDCODE_KEY_VALUE_H_
#define PREDCODE_KEY_VALUE_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace predcode {

// "key = value" lines, '#' starts a comment, blank lines ignored.
// Duplicate keys and lines without '=' raise ParseError with the line number.
using KeyValues = std::map<std::string, std::string>;

KeyValues ParseKeyValueText(const std::string &text, const std::string &source);
KeyValues ReadKeyValueFile(const std::string &path);
std::string FormatKeyValues(const std::vector<std::pair<std::string, std::string>> &entries);

}  // namespace predcode

#endif  // PREDCODE_KEY_VALUE_H_
