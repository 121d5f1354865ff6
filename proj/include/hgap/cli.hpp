#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hgap {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitComputation = 2 };

/// Runs one command line (args excludes the program name). Normal output goes
/// to `out`, errors as a JSON object to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hgap
