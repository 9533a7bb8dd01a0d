// src/errors.cc

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

#include "predcode/errors.h"

namespace predcode {

const char *CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kDimension: return "dimension";
    case ErrorCategory::kConsistency: return "consistency";
    case ErrorCategory::kNumerical: return "numerical";
    case ErrorCategory::kEmptyInput: return "empty_input";
    case ErrorCategory::kShift: return "shift";
    case ErrorCategory::kLookup: return "lookup";
    case ErrorCategory::kSampling: return "sampling";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kMissingInput: return "missing_input";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kContract: return "contract";
  }
  return "unknown";
}

}  // namespace predcode
