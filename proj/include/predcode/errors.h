// predcode/errors.h

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

#ifndef PREDCODE_ERRORS_H_
#define PREDCODE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace predcode {

// Every error thrown by the library carries a category; the command-line
// tool maps categories onto exit codes.
enum class ErrorCategory {
  kDimension,
  kConsistency,
  kNumerical,
  kEmptyInput,
  kShift,
  kLookup,
  kSampling,
  kParse,
  kMissingInput,
  kConfig,
  kContract,
};

const char *CategoryName(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string &message)
      : std::runtime_error(message), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

#define PREDCODE_DEFINE_ERROR(Name, Category)                 \
  class Name : public Error {                                 \
   public:                                                    \
    explicit Name(const std::string &message)                 \
        : Error(ErrorCategory::Category, message) {}          \
  };

PREDCODE_DEFINE_ERROR(DimensionError, kDimension)
PREDCODE_DEFINE_ERROR(ConsistencyError, kConsistency)
PREDCODE_DEFINE_ERROR(NumericalError, kNumerical)
PREDCODE_DEFINE_ERROR(EmptyInputError, kEmptyInput)
PREDCODE_DEFINE_ERROR(ShiftError, kShift)
PREDCODE_DEFINE_ERROR(LookupError, kLookup)
PREDCODE_DEFINE_ERROR(SamplingError, kSampling)
PREDCODE_DEFINE_ERROR(ParseError, kParse)
PREDCODE_DEFINE_ERROR(MissingInputError, kMissingInput)
PREDCODE_DEFINE_ERROR(ConfigError, kConfig)
PREDCODE_DEFINE_ERROR(ContractError, kContract)

#undef PREDCODE_DEFINE_ERROR

}  // namespace predcode

#endif  // PREDCODE_ERRORS_H_
