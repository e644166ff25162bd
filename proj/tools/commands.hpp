#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace simplexsmooth::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kRuntimeFailure = 3,
  kPartialCompletion = 4,
};

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "1..6", "1,3,5" or mixtures such as "1..3,5".
std::vector<int> parse_int_list(const std::string& text);

} // namespace simplexsmooth::cli
