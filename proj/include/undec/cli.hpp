#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace undec {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 2,
  kExitExhausted = 10,
  kExitCollision = 11,
  kExitMismatch = 12,
};

/// Runs the command line `args` (without the program name). Reports go to
/// --out when given, otherwise to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace undec
