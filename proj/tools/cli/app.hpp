#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace insider::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kNumericalFailure = 2,
  kVerdictFailure = 3,
};

/// Runs one command line. args[0] is the program name. Results go to the
/// --output file (or `out` for "-"); the one-line summary goes to `out` and
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace insider::cli
