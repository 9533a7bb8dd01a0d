// predcode/cli.h

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

#ifndef PREDCODE_CLI_H_
#define PREDCODE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "predcode/errors.h"

namespace predcode {

// Process exit codes of the command-line tool.
enum ExitCode {
  kExitOk = 0,
  kExitOther = 1,
  kExitUsage = 2,         // bad flags or config validation
  kExitMissingInput = 3,
  kExitDimension = 4,
  kExitParse = 5,
  kExitNumerical = 6,
};

int ExitCodeFor(ErrorCategory category);

// Runs one command.  args excludes the program name.  Failures print a single
// "error: category=<name> message=<text>" line to err and return the exit
// code for the category.
int RunCommandLine(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

// Environment variable that, when set, roots every relative output directory.
inline constexpr const char *kOutRootVariable = "PREDCODE_OUT_ROOT";

}  // namespace predcode

#endif  // PREDCODE_CLI_H_
