#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gapgraph::cli {

/// Exit codes: 0 success, 2 verdict-level failure, 1 error.
enum ExitCode : int { kOk = 0, kError = 1, kVerdict = 2 };

/// Runs one command line. Reports go to `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gapgraph::cli
