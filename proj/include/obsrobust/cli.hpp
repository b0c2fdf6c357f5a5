#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace obsrobust {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,          // usage, I/O, parse or validation failure
  kExitUnobservable = 2,   // input already unobservable; report still written
  kExitCap = 3,            // multiplicity or deficiency cap exceeded
  kExitMismatch = 4,       // oracle disagrees with the algorithm
};

/// Runs the command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace obsrobust
