#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace robustik {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNoSolution = 3,
  kExitNumerical = 4,
};

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out` unless --out names a file; diagnostics and logs go to `err`.
[[nodiscard]] int run_cli(const std::vector<std::string>& args, std::ostream& out,
                          std::ostream& err);

}  // namespace robustik
