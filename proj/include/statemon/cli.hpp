#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace statemon {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitSpecError = 1,
  kExitIo = 2,  // unreadable or malformed input, bad invocation, unwritable output
  kExitViolations = 3,
  kExitMissingSensors = 4,
};

/// Runs one command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace statemon
