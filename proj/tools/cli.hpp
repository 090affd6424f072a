#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uhl::cli {

/// Exit statuses of the command-line front end.
enum ExitStatus : int {
  kExitOk = 0,
  kExitCheckFailed = 1,   // selftest found a failing check
  kExitUsage = 2,         // malformed flags or an invalid sweep specification
  kExitNumeric = 3,       // the computation itself raised an error
  kExitInternal = 4,      // anything unexpected
};

/// Runs one invocation. `args` excludes the program name. Data goes to `out` (or to the
/// file named by -o/--output), diagnostics and error records to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uhl::cli
