#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ncar::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kNumericalFailure = 2 };

/// Runs one invocation. `args` excludes the program name; normal output goes to `out`,
/// the resolved-config echo and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncar::cli
